#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "deltalap/config.hpp"
#include "deltalap/grid.hpp"

namespace deltalap {

// How a check compares its measured value with the expected one.
enum class Comparison {
    AbsDiff,  // |measured - expected| <= tolerance
    RelDiff,  // |measured - expected| <= tolerance |expected|
    AtMost,   // measured <= expected
    AtLeast,  // measured >= expected
    Flag,     // measured is 1 (true) or 0 (false)
};

struct CheckRecord {
    std::string name;
    int criterion = 0;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    Comparison comparison = Comparison::AbsDiff;
    std::string provenance;  // closed-form | oracle | asymptotic-exponent
    std::string note;
    bool pass = false;
    double seconds = 0.0;
};

CheckRecord make_check(std::string name, double measured, double expected, double tolerance, Comparison cmp,
                       std::string provenance, std::string note = {});
bool evaluate(const CheckRecord& c);

struct Table {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<double> row);
};

struct RunOutput {
    std::vector<CheckRecord> checks;
    std::vector<Table> tables;
    std::vector<std::pair<std::string, Field>> checkpoints;
    std::vector<std::string> errors;  // runtime errors, verbatim
    std::vector<std::pair<std::string, double>> timings;

    void append(RunOutput other);
    bool all_pass() const;
};

std::string csv_field(const std::string& s);
std::string to_csv(const Table& t);
std::string format_number(double v);

// report.json content; contains no wall-clock data so equal runs give equal bytes
nlohmann::json report_json(const ExperimentConfig& cfg, const RunOutput& out);

// report.json, timings.json, <table>.csv and checkpoints, each written atomically
void write_outputs(const std::string& dir, const ExperimentConfig& cfg, const RunOutput& out);

}  // namespace deltalap
