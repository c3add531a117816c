#pragma once

// Serialization and run-configuration layer: JSON codecs for the core
// value types, strict parsing of run configs (schema-versioned, unknown
// keys rejected), CLI-style spec strings ("psi:1", "radial:0.5,30",
// "indicator:0.1"), CSV emission with fixed 17-significant-digit
// formatting, and the run manifest that makes every output reproducible.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "disklab/diagnostics.hpp"
#include "disklab/harmonic.hpp"
#include "disklab/sequence.hpp"

namespace disklab {

using Json = nlohmann::json;

// Thrown on any malformed config, spec string, or input file.  The
// attached diagnostic is a JSON object ({"error": ..., "detail": ...})
// so callers can emit it machine-readably; what() carries the same text.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string error, std::string detail);
    const Json& diagnostic() const { return diag_; }

  private:
    Json diag_;
};

// ------------------------------------------------------------ JSON codecs

Json sequence_to_json(const GeneratedSequence& seq);
GeneratedSequence sequence_from_json(const Json& j);

Json arc_weight_to_json(const ArcWeight& w);
ArcWeight arc_weight_from_json(const Json& j);

Json measure_to_json(const DiscreteMeasure& nu);
DiscreteMeasure measure_from_json(const Json& j);

// ------------------------------------------------------------ spec strings

// "power:P" (P >= 1), "psi:E", "loglog:E", "linear", or
// "table:t1,v1;t2,v2;..." with strictly increasing t.
OrliczShape parse_shape(const std::string& text);

// "section6:EPS,NMAX", "radial:Q,COUNT", "pairs:Q,COUNT,ETA", or
// "points:re,im;re,im;..." for an explicit list.
GeneratedSequence parse_generator(const std::string& text);

// Boundary weights that need no sequence context:
//   "indicator:A"  indicator of an arc of normalized length A in (0, 1]
//   "const:V"      constant weight V > 0
//   "shadow:C0,C"  deferred; resolved against a sequence by the caller
struct WeightSpec {
    std::string kind; // "indicator" | "const" | "shadow"
    double a = 0.0;   // indicator length or constant value
    double c0 = 0.0;  // shadow scale
    double c = 0.0;   // shadow half-width multiplier
};

WeightSpec parse_weight(const std::string& text);

// Builds the weight (shadow specs need the sequence; others ignore it).
ArcWeight resolve_weight(const WeightSpec& spec, const GeneratedSequence& seq);

// --------------------------------------------------------------- run config

// One flat config drives every subcommand; which fields matter depends on
// the command.  Parsing is strict: schema_version must match, unknown
// keys are rejected, and every tolerance must be positive.
struct RunConfig {
    int schema_version = 1;
    std::string command;
    std::string generator;          // generator spec string
    std::string shape = "psi:1";    // shape spec string
    std::string weight;             // weight spec string
    std::string measure;            // path to a measure JSON file
    std::string atoms;              // inline atoms "re,im;re,im;..."
    std::string masses;             // inline masses "m,m,..."
    double epsilon = 1.0;
    int n_lo = 8;
    int n_hi = 14;
    int j_offset = 16;
    double delta = 0.0;             // condition-d separation (0 = measured)
    double c0 = 1.0;                // membership series scale
    int64_t series_terms = 1000000;
    std::vector<double> cf = {1.0, 10.0, 100.0};
    int budget = 96;                // dual search adjustments
    int golden_iters = 24;
    std::size_t grid_base = 1024;   // boundary grid base points
    double grid_window = 4.0;
    double grid_spacing = 4.0;
    bool grid_gauss2 = false;
    unsigned threads = 1;
    bool strict = false;
    std::string out_dir;            // empty: $DISKLAB_OUTPUT_DIR or "."
    std::string label;              // output filename stem ("" = command)
    std::map<std::string, double> tolerances;
};

RunConfig config_from_json(const Json& j);
Json config_to_json(const RunConfig& cfg);

// Reads a config file; a manifest written by write_manifest is accepted
// too (its embedded config is extracted), which is what makes re-running
// from a manifest a one-flag operation.
RunConfig load_config(const std::string& path);

// Applies defaults that depend on the environment (output directory from
// DISKLAB_OUTPUT_DIR when unset) and validates cross-field constraints.
void finalize_config(RunConfig& cfg);

// ------------------------------------------------------------------- CSV

// All floating-point cells use "%.17g": round-trip exact and stable, so
// identical runs produce identical bytes.
std::string csv_double(double v);

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);
    void begin_row();
    void cell(double v);
    void cell(int64_t v);
    void cell(std::size_t v);
    void cell(int v);
    void cell(const std::string& s);
    const std::string& text() const { return text_; }

  private:
    std::string text_;
    std::size_t width_ = 0;
    std::size_t in_row_ = 0;
    bool open_ = false;
};

// Fixed table layouts shared by the CLI and the tests.  Each writer
// returns the full file contents; write_text puts them on disk.
std::string sequence_csv(const GeneratedSequence& seq);
std::string member_report_csv(const GeneratedSequence& seq,
                              const DiagnosticReport& report);
std::string growth_csv(const std::vector<GrowthRow>& rows,
                       const std::vector<double>& cf);
std::string trace_csv(const std::vector<DualSearchRow>& trace);
std::string boundary_csv(const ArcWeight& w);
std::string measure_csv(const DiscreteMeasure& nu);

void write_text(const std::string& path, const std::string& contents);
std::string read_text(const std::string& path);

// --------------------------------------------------------------- manifest

// The manifest sits next to every output set and records the resolved
// config, the files written, and the headline results.  It contains no
// timestamps or host data, so re-running the same command reproduces it
// byte for byte; feeding it back through --config reproduces the outputs.
Json make_manifest(const RunConfig& cfg,
                   const std::vector<std::string>& outputs,
                   const Json& results);

void write_manifest(const std::string& path, const Json& manifest);

} // namespace disklab
