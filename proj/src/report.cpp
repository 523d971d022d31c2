#include "deltalap/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "deltalap/io.hpp"

namespace deltalap {

using nlohmann::json;

CheckRecord make_check(std::string name, double measured, double expected, double tolerance, Comparison cmp,
                       std::string provenance, std::string note)
{
    CheckRecord c;
    c.name = std::move(name);
    c.measured = measured;
    c.expected = expected;
    c.tolerance = tolerance;
    c.comparison = cmp;
    c.provenance = std::move(provenance);
    c.note = std::move(note);
    c.pass = evaluate(c);
    return c;
}

bool evaluate(const CheckRecord& c)
{
    const double m = c.measured, e = c.expected;
    if (std::isnan(m))
        return false;
    switch (c.comparison) {
    case Comparison::AbsDiff: return std::fabs(m - e) <= c.tolerance;
    case Comparison::RelDiff: return std::fabs(m - e) <= c.tolerance * std::fabs(e);
    case Comparison::AtMost: return m <= e;
    case Comparison::AtLeast: return m >= e;
    case Comparison::Flag: return m == 1.0;
    }
    return false;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Table::add(std::vector<double> row)
{
    std::vector<std::string> r;
    r.reserve(row.size());
    for (double v : row)
        r.push_back(format_number(v));
    rows.push_back(std::move(r));
}

void RunOutput::append(RunOutput other)
{
    for (auto& c : other.checks)
        checks.push_back(std::move(c));
    for (auto& t : other.tables)
        tables.push_back(std::move(t));
    for (auto& c : other.checkpoints)
        checkpoints.push_back(std::move(c));
    for (auto& e : other.errors)
        errors.push_back(std::move(e));
    for (auto& t : other.timings)
        timings.push_back(std::move(t));
}

bool RunOutput::all_pass() const
{
    if (!errors.empty() || checks.empty())
        return false;
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    return true;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string to_csv(const Table& t)
{
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += csv_field(cells[i]);
        }
        out += "\r\n";
    };
    line(t.header);
    for (const auto& r : t.rows)
        line(r);
    return out;
}

namespace {

const char* comparison_name(Comparison c)
{
    switch (c) {
    case Comparison::AbsDiff: return "abs_diff_le_tolerance";
    case Comparison::RelDiff: return "rel_diff_le_tolerance";
    case Comparison::AtMost: return "measured_le_expected";
    case Comparison::AtLeast: return "measured_ge_expected";
    case Comparison::Flag: return "flag";
    }
    return "";
}

json number(double v)
{
    if (std::isfinite(v))
        return v;
    return format_number(v);
}

}  // namespace

json report_json(const ExperimentConfig& cfg, const RunOutput& out)
{
    json j;
    j["schema"] = "1";
    j["experiment"] = cfg.experiment;
    j["config"] = cfg.to_json();
    json checks = json::array();
    int passed = 0;
    for (const auto& c : out.checks) {
        passed += c.pass;
        json r;
        r["name"] = c.name;
        r["criterion"] = c.criterion;
        r["measured"] = number(c.measured);
        r["expected"] = number(c.expected);
        r["tolerance"] = number(c.tolerance);
        r["comparison"] = comparison_name(c.comparison);
        r["provenance"] = c.provenance;
        r["pass"] = c.pass;
        if (!c.note.empty())
            r["note"] = c.note;
        checks.push_back(std::move(r));
    }
    j["checks"] = std::move(checks);
    j["errors"] = out.errors;
    json tables = json::array();
    for (const auto& t : out.tables)
        tables.push_back(t.name + ".csv");
    j["tables"] = std::move(tables);
    j["summary"] = {{"checks", out.checks.size()},
                    {"passed", passed},
                    {"failed", static_cast<int>(out.checks.size()) - passed},
                    {"errors", out.errors.size()},
                    {"all_pass", out.all_pass()}};
    return j;
}

void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const RunOutput& out)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);
    write_file_atomic((base / "report.json").string(), report_json(cfg, out).dump(2) + "\n");
    json t = json::object();
    for (const auto& c : out.checks)
        t["checks"][c.name] = c.seconds;
    for (const auto& [name, sec] : out.timings)
        t["criteria"][name] = sec;
    write_file_atomic((base / "timings.json").string(), t.dump(2) + "\n");
    for (const auto& table : out.tables)
        write_file_atomic((base / (table.name + ".csv")).string(), to_csv(table));
    if (!out.checkpoints.empty()) {
        fs::create_directories(base / "checkpoints");
        for (const auto& [name, field] : out.checkpoints)
            write_field((base / "checkpoints" / name).string(), field);
    }
}

}  // namespace deltalap
