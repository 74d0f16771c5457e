#pragma once

#include "bracketlab/model.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace bracketlab::io {

/// Process exit codes shared by the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_io = 2,
    exit_validation = 3,
    exit_budget = 4,
};

/// File missing/unreadable/unwritable.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent content (reported with source line numbers).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One row of a choices CSV:
///   subject_id,experiment,decision,subdecision,line_index,qty_a,qty_b
/// decision/subdecision are 1-based in the file; the qty columns are optional
/// exact cross-checks against the line's bundle.
struct ChoiceRow {
    std::string subject_id;
    std::string experiment;
    int decision = 0;    // 1-based
    int subdecision = 0; // 1-based
    int line_index = 0;  // 0-based
    bool has_qty = false;
    Rational qty_a, qty_b;
    int source_line = 0;
};

std::vector<ChoiceRow> read_choices_csv(std::istream& in, const std::string& name);
std::vector<ChoiceRow> read_choices_file(const std::string& path);

/// Filters rows to `experiment`, validates indices and qty cross-checks
/// against the design, requires exactly one row per subdecision per subject,
/// and returns subjects sorted by subject_id.
std::vector<model::SubjectChoices> assemble_subjects(const model::ExperimentDesign& design,
                                                     const std::string& experiment,
                                                     const std::vector<ChoiceRow>& rows);

/// Emits the CSV form (with qty columns) of full subject profiles.
void write_choices_csv(std::ostream& out, const model::ExperimentDesign& design,
                       const std::string& experiment,
                       const std::vector<model::SubjectChoices>& subjects);

/// Design serialization, schema "bracketlab-design/1". Rationals are "p/q"
/// strings so round-trips are exact.
std::string design_to_json(const model::ExperimentDesign& design);
model::ExperimentDesign design_from_json(const std::string& text);

/// "risk" | "social" | "shopping" | "file:<path to design json>".
model::ExperimentDesign load_design(const std::string& spec);

/// FNV-1a over the canonical design serialization; stamped into reports.
std::string design_hash(const model::ExperimentDesign& design);

} // namespace bracketlab::io
