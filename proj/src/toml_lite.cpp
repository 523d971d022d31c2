#include "deltalap/toml_lite.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "deltalap/errors.hpp"

namespace deltalap {

namespace {

using nlohmann::json;

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    json run()
    {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_ws_lines();
            if (eof())
                break;
            if (peek() == '[') {
                ++pos_;
                bool array_table = peek() == '[';
                if (array_table)
                    ++pos_;
                skip_inline_ws();
                auto path = parse_key();
                skip_inline_ws();
                expect(']');
                if (array_table)
                    expect(']');
                table = &root;
                for (std::size_t i = 0; i < path.size(); ++i) {
                    json& next = (*table)[path[i]];
                    if (next.is_null())
                        next = (array_table && i + 1 == path.size()) ? json::array() : json::object();
                    if (next.is_array()) {
                        if (i + 1 == path.size())
                            next.push_back(json::object());
                        table = &next.back();
                    } else if (next.is_object()) {
                        table = &next;
                    } else {
                        fail("key '" + path[i] + "' is not a table");
                    }
                }
                end_of_line();
                continue;
            }
            auto path = parse_key();
            skip_inline_ws();
            expect('=');
            skip_inline_ws();
            json value = parse_value();
            assign(*table, path, std::move(value));
            end_of_line();
        }
        return root;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }

    int line() const
    {
        int n = 1;
        for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i)
            n += s_[i] == '\n';
        return n;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError("TOML line " + std::to_string(line()) + ": " + msg);
    }

    void expect(char c)
    {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void skip_inline_ws()
    {
        while (!eof() && (peek() == ' ' || peek() == '\t'))
            ++pos_;
    }

    void skip_comment()
    {
        if (peek() == '#')
            while (!eof() && peek() != '\n')
                ++pos_;
    }

    void skip_ws_lines()
    {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n')
                ++pos_;
            else if (c == '#')
                skip_comment();
            else
                break;
        }
    }

    void end_of_line()
    {
        skip_inline_ws();
        skip_comment();
        if (peek() == '\r')
            ++pos_;
        if (!eof() && peek() != '\n')
            fail("unexpected text after value");
    }

    std::string parse_key_part()
    {
        if (peek() == '"' || peek() == '\'')
            return parse_string();
        std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
            ++pos_;
        if (start == pos_)
            fail("expected a key");
        return s_.substr(start, pos_ - start);
    }

    std::vector<std::string> parse_key()
    {
        std::vector<std::string> path{parse_key_part()};
        skip_inline_ws();
        while (peek() == '.') {
            ++pos_;
            skip_inline_ws();
            path.push_back(parse_key_part());
            skip_inline_ws();
        }
        return path;
    }

    void assign(json& table, const std::vector<std::string>& path, json value)
    {
        json* t = &table;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            json& next = (*t)[path[i]];
            if (next.is_null())
                next = json::object();
            if (!next.is_object())
                fail("key '" + path[i] + "' is not a table");
            t = &next;
        }
        if (t->contains(path.back()))
            fail("duplicate key '" + path.back() + "'");
        (*t)[path.back()] = std::move(value);
    }

    std::string parse_string()
    {
        char q = peek();
        ++pos_;
        std::string out;
        while (true) {
            if (eof() || peek() == '\n')
                fail("unterminated string");
            char c = s_[pos_++];
            if (c == q)
                break;
            if (c == '\\' && q == '"') {
                char e = s_[pos_++];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
                continue;
            }
            out += c;
        }
        return out;
    }

    json parse_number()
    {
        std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                          peek() == '.' || peek() == '_'))
            ++pos_;
        std::string tok;
        for (std::size_t i = start; i < pos_; ++i)
            if (s_[i] != '_')
                tok += s_[i];
        std::string body = tok;
        double sign = 1.0;
        if (!body.empty() && (body[0] == '+' || body[0] == '-')) {
            sign = body[0] == '-' ? -1.0 : 1.0;
            body = body.substr(1);
        }
        if (body == "inf")
            return sign * std::numeric_limits<double>::infinity();
        if (body == "nan")
            return std::numeric_limits<double>::quiet_NaN();
        if (tok.empty())
            fail("expected a value");
        bool is_float = tok.find_first_of(".eE") != std::string::npos;
        std::size_t used = 0;
        try {
            if (is_float) {
                double v = std::stod(tok, &used);
                if (used == tok.size())
                    return v;
            } else {
                long long v = std::stoll(tok, &used);
                if (used == tok.size())
                    return v;
            }
        } catch (const std::exception&) {
        }
        fail("malformed value '" + tok + "'");
    }

    json parse_value()
    {
        char c = peek();
        if (c == '"' || c == '\'')
            return parse_string();
        if (c == '[') {
            ++pos_;
            json arr = json::array();
            while (true) {
                skip_ws_lines();
                if (peek() == ']') {
                    ++pos_;
                    return arr;
                }
                arr.push_back(parse_value());
                skip_ws_lines();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                skip_ws_lines();
                expect(']');
                return arr;
            }
        }
        if (c == '{') {
            ++pos_;
            json obj = json::object();
            skip_inline_ws();
            if (peek() == '}') {
                ++pos_;
                return obj;
            }
            while (true) {
                skip_inline_ws();
                auto path = parse_key();
                skip_inline_ws();
                expect('=');
                skip_inline_ws();
                assign(obj, path, parse_value());
                skip_inline_ws();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                expect('}');
                return obj;
            }
        }
        if (s_.compare(pos_, 4, "true") == 0) {
            pos_ += 4;
            return true;
        }
        if (s_.compare(pos_, 5, "false") == 0) {
            pos_ += 5;
            return false;
        }
        return parse_number();
    }
};

}  // namespace

nlohmann::json parse_toml(const std::string& text)
{
    return Parser(text).run();
}

}  // namespace deltalap
