#include "disklab/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace disklab {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void fail(const std::string& error, const std::string& detail) {
    throw ConfigError(error, detail);
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail("bad-number", what + ": cannot parse '" + s + "'");
    }
    if (used != s.size())
        fail("bad-number", what + ": trailing characters in '" + s + "'");
    return v;
}

int64_t to_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int64_t v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        fail("bad-number", what + ": cannot parse '" + s + "'");
    }
    if (used != s.size())
        fail("bad-number", what + ": trailing characters in '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

// "tag:rest" -> {tag, rest}; plain "tag" -> {tag, ""}.
std::pair<std::string, std::string> split_tag(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) return {text, ""};
    return {text.substr(0, colon), text.substr(colon + 1)};
}

std::vector<double> json_doubles(const Json& j, const char* what) {
    if (!j.is_array()) fail("bad-field", std::string(what) + " must be an array");
    std::vector<double> out;
    for (const Json& e : j) {
        if (!e.is_number())
            fail("bad-field", std::string(what) + " entries must be numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<DiskPoint> json_points(const Json& j, const char* what) {
    if (!j.is_array()) fail("bad-field", std::string(what) + " must be an array");
    std::vector<DiskPoint> out;
    for (const Json& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            fail("bad-field", std::string(what) + " entries must be [re, im] pairs");
        try {
            out.push_back(disk_point(e[0].get<double>(), e[1].get<double>()));
        } catch (const std::invalid_argument& ex) {
            fail("bad-point", std::string(what) + ": " + ex.what());
        }
    }
    return out;
}

} // namespace

ConfigError::ConfigError(std::string error, std::string detail)
    : std::runtime_error(error + ": " + detail),
      diag_(Json{{"error", std::move(error)}, {"detail", std::move(detail)}}) {}

// ------------------------------------------------------------ JSON codecs

Json sequence_to_json(const GeneratedSequence& seq) {
    Json gen{{"tag", seq.generator.tag}};
    if (seq.generator.tag == "section6") {
        gen["eps"] = seq.generator.eps;
        gen["n_max"] = seq.generator.n_max;
    } else if (seq.generator.tag == "radial") {
        gen["q"] = seq.generator.q;
        gen["count"] = seq.generator.count;
    } else if (seq.generator.tag == "pairs") {
        gen["q"] = seq.generator.q;
        gen["count"] = seq.generator.count;
        gen["eta"] = seq.generator.eta;
    }
    Json pts = Json::array();
    for (const DiskPoint& z : seq.points) pts.push_back(Json::array({z.re, z.im}));
    return Json{{"generator", gen},
                {"points", pts},
                {"stage", seq.stage},
                {"index", seq.index}};
}

GeneratedSequence sequence_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("generator") || !j.contains("points"))
        fail("bad-sequence", "expected {generator, points, ...}");
    const Json& gen = j.at("generator");
    const std::string tag = gen.value("tag", "explicit");
    if (tag == "section6")
        return gen_crowded(gen.at("eps").get<double>(), gen.at("n_max").get<int>());
    if (tag == "radial")
        return gen_radial(gen.at("q").get<double>(), gen.at("count").get<int>());
    if (tag == "pairs")
        return gen_perturbed_pairs(gen.at("q").get<double>(),
                                   gen.at("count").get<int>(),
                                   gen.at("eta").get<double>());
    if (tag != "explicit") fail("bad-sequence", "unknown generator tag " + tag);
    return gen_explicit(json_points(j.at("points"), "points"));
}

Json arc_weight_to_json(const ArcWeight& w) {
    return Json{{"breaks", w.breaks}, {"values", w.values}};
}

ArcWeight arc_weight_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("breaks") || !j.contains("values"))
        fail("bad-weight", "expected {breaks, values}");
    try {
        return make_arc_weight(json_doubles(j.at("breaks"), "breaks"),
                               json_doubles(j.at("values"), "values"));
    } catch (const std::invalid_argument& ex) {
        fail("bad-weight", ex.what());
    }
}

Json measure_to_json(const DiscreteMeasure& nu) {
    Json atoms = Json::array();
    for (const DiskPoint& z : nu.atoms) atoms.push_back(Json::array({z.re, z.im}));
    return Json{{"atoms", atoms}, {"masses", nu.masses}};
}

DiscreteMeasure measure_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("atoms") || !j.contains("masses"))
        fail("bad-measure", "expected {atoms, masses}");
    try {
        return make_measure(json_points(j.at("atoms"), "atoms"),
                            json_doubles(j.at("masses"), "masses"));
    } catch (const std::invalid_argument& ex) {
        fail("bad-measure", ex.what());
    }
}

// ------------------------------------------------------------ spec strings

OrliczShape parse_shape(const std::string& text) {
    const auto [tag, rest] = split_tag(text);
    try {
        if (tag == "linear") {
            if (!rest.empty()) fail("bad-shape", "linear takes no parameter");
            return OrliczShape::linear();
        }
        if (tag == "power") return OrliczShape::power(to_double(rest, "power"));
        if (tag == "psi") return OrliczShape::psi(to_double(rest, "psi"));
        if (tag == "loglog") return OrliczShape::loglog(to_double(rest, "loglog"));
        if (tag == "table") {
            std::vector<std::pair<double, double>> nodes;
            for (const std::string& piece : split(rest, ';')) {
                const auto pair = split(piece, ',');
                if (pair.size() != 2)
                    fail("bad-shape", "table nodes must be t,v pairs");
                nodes.emplace_back(to_double(pair[0], "table t"),
                                   to_double(pair[1], "table v"));
            }
            return OrliczShape::from_table(nodes);
        }
    } catch (const std::invalid_argument& ex) {
        fail("bad-shape", ex.what());
    }
    fail("bad-shape", "unknown shape '" + text + "'");
}

GeneratedSequence parse_generator(const std::string& text) {
    const auto [tag, rest] = split_tag(text);
    const auto args = split(rest, ',');
    try {
        if (tag == "section6") {
            if (args.size() != 2) fail("bad-generator", "section6 needs EPS,NMAX");
            return gen_crowded(to_double(args[0], "eps"),
                               int(to_int(args[1], "n_max")));
        }
        if (tag == "radial") {
            if (args.size() != 2) fail("bad-generator", "radial needs Q,COUNT");
            return gen_radial(to_double(args[0], "q"),
                              int(to_int(args[1], "count")));
        }
        if (tag == "pairs") {
            if (args.size() != 3) fail("bad-generator", "pairs needs Q,COUNT,ETA");
            return gen_perturbed_pairs(to_double(args[0], "q"),
                                       int(to_int(args[1], "count")),
                                       to_double(args[2], "eta"));
        }
        if (tag == "points") {
            std::vector<DiskPoint> pts;
            for (const std::string& piece : split(rest, ';')) {
                const auto pair = split(piece, ',');
                if (pair.size() != 2)
                    fail("bad-generator", "points must be re,im pairs");
                pts.push_back(disk_point(to_double(pair[0], "re"),
                                         to_double(pair[1], "im")));
            }
            return gen_explicit(std::move(pts));
        }
    } catch (const std::invalid_argument& ex) {
        fail("bad-generator", ex.what());
    }
    fail("bad-generator", "unknown generator '" + text + "'");
}

WeightSpec parse_weight(const std::string& text) {
    const auto [tag, rest] = split_tag(text);
    const auto args = split(rest, ',');
    WeightSpec spec;
    spec.kind = tag;
    if (tag == "indicator") {
        if (args.size() != 1) fail("bad-weight", "indicator needs one length");
        spec.a = to_double(args[0], "indicator length");
        if (!(spec.a > 0.0 && spec.a <= 1.0))
            fail("bad-weight", "indicator length must lie in (0, 1]");
        return spec;
    }
    if (tag == "const") {
        if (args.size() != 1) fail("bad-weight", "const needs one value");
        spec.a = to_double(args[0], "const value");
        if (!(spec.a > 0.0)) fail("bad-weight", "const value must be > 0");
        return spec;
    }
    if (tag == "shadow") {
        if (args.size() != 2) fail("bad-weight", "shadow needs C0,C");
        spec.c0 = to_double(args[0], "shadow c0");
        spec.c = to_double(args[1], "shadow c");
        if (!(spec.c0 > 0.0 && spec.c > 0.0))
            fail("bad-weight", "shadow parameters must be > 0");
        return spec;
    }
    fail("bad-weight", "unknown weight '" + text + "'");
}

ArcWeight resolve_weight(const WeightSpec& spec, const GeneratedSequence& seq) {
    if (spec.kind == "indicator") {
        if (spec.a >= 1.0) return make_arc_weight({0.0}, {1.0});
        return make_arc_weight({0.0, 2.0 * kPi * spec.a}, {1.0, 0.0});
    }
    if (spec.kind == "const") return make_arc_weight({0.0}, {spec.a});
    if (spec.kind == "shadow") {
        if (seq.size() == 0) fail("bad-weight", "shadow weight needs a sequence");
        return shadow_weight(seq, spec.c0, spec.c);
    }
    fail("bad-weight", "unknown weight kind '" + spec.kind + "'");
}

// --------------------------------------------------------------- run config

namespace {

const std::map<std::string, int>& config_keys() {
    static const std::map<std::string, int> keys = {
        {"schema_version", 0}, {"command", 1},      {"generator", 1},
        {"shape", 1},          {"weight", 1},       {"measure", 1},
        {"atoms", 1},          {"masses", 1},       {"epsilon", 2},
        {"n_lo", 3},           {"n_hi", 3},         {"j_offset", 3},
        {"delta", 2},          {"c0", 2},           {"series_terms", 4},
        {"cf", 5},             {"budget", 3},       {"golden_iters", 3},
        {"grid_base", 4},      {"grid_window", 2},  {"grid_spacing", 2},
        {"grid_gauss2", 6},    {"threads", 3},      {"strict", 6},
        {"out_dir", 1},        {"label", 1},        {"tolerances", 7},
    };
    return keys;
}

} // namespace

RunConfig config_from_json(const Json& j) {
    if (!j.is_object()) fail("bad-config", "config must be a JSON object");
    const auto& keys = config_keys();
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (keys.find(key) == keys.end())
            fail("unknown-field", "config key '" + key + "' is not recognised");
    }
    RunConfig cfg;
    if (j.contains("schema_version")) {
        if (!j.at("schema_version").is_number_integer())
            fail("bad-field", "schema_version must be an integer");
        cfg.schema_version = j.at("schema_version").get<int>();
    }
    if (cfg.schema_version != 1)
        fail("bad-schema", "unsupported schema_version " +
                               std::to_string(cfg.schema_version));

    const auto str = [&](const char* key, std::string& slot) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_string())
            fail("bad-field", std::string(key) + " must be a string");
        slot = j.at(key).get<std::string>();
    };
    const auto num = [&](const char* key, double& slot) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number())
            fail("bad-field", std::string(key) + " must be a number");
        slot = j.at(key).get<double>();
    };
    const auto integer = [&](const char* key, auto& slot) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number_integer())
            fail("bad-field", std::string(key) + " must be an integer");
        slot = j.at(key).get<std::decay_t<decltype(slot)>>();
    };
    const auto boolean = [&](const char* key, bool& slot) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_boolean())
            fail("bad-field", std::string(key) + " must be a boolean");
        slot = j.at(key).get<bool>();
    };

    str("command", cfg.command);
    str("generator", cfg.generator);
    str("shape", cfg.shape);
    str("weight", cfg.weight);
    str("measure", cfg.measure);
    str("atoms", cfg.atoms);
    str("masses", cfg.masses);
    str("out_dir", cfg.out_dir);
    str("label", cfg.label);
    num("epsilon", cfg.epsilon);
    num("delta", cfg.delta);
    num("c0", cfg.c0);
    num("grid_window", cfg.grid_window);
    num("grid_spacing", cfg.grid_spacing);
    integer("n_lo", cfg.n_lo);
    integer("n_hi", cfg.n_hi);
    integer("j_offset", cfg.j_offset);
    integer("series_terms", cfg.series_terms);
    integer("budget", cfg.budget);
    integer("golden_iters", cfg.golden_iters);
    integer("grid_base", cfg.grid_base);
    integer("threads", cfg.threads);
    boolean("grid_gauss2", cfg.grid_gauss2);
    boolean("strict", cfg.strict);
    if (j.contains("cf")) cfg.cf = json_doubles(j.at("cf"), "cf");
    if (j.contains("tolerances")) {
        const Json& t = j.at("tolerances");
        if (!t.is_object()) fail("bad-field", "tolerances must be an object");
        cfg.tolerances.clear();
        for (const auto& [key, value] : t.items()) {
            if (!value.is_number())
                fail("bad-field", "tolerance '" + key + "' must be a number");
            const double tol = value.get<double>();
            if (!(tol > 0.0))
                fail("bad-tolerance", "tolerance '" + key + "' must be > 0");
            cfg.tolerances[key] = tol;
        }
    }
    return cfg;
}

Json config_to_json(const RunConfig& cfg) {
    Json j{{"schema_version", cfg.schema_version},
           {"command", cfg.command},
           {"generator", cfg.generator},
           {"shape", cfg.shape},
           {"weight", cfg.weight},
           {"measure", cfg.measure},
           {"atoms", cfg.atoms},
           {"masses", cfg.masses},
           {"epsilon", cfg.epsilon},
           {"n_lo", cfg.n_lo},
           {"n_hi", cfg.n_hi},
           {"j_offset", cfg.j_offset},
           {"delta", cfg.delta},
           {"c0", cfg.c0},
           {"series_terms", cfg.series_terms},
           {"cf", cfg.cf},
           {"budget", cfg.budget},
           {"golden_iters", cfg.golden_iters},
           {"grid_base", cfg.grid_base},
           {"grid_window", cfg.grid_window},
           {"grid_spacing", cfg.grid_spacing},
           {"grid_gauss2", cfg.grid_gauss2},
           {"threads", cfg.threads},
           {"strict", cfg.strict},
           {"out_dir", cfg.out_dir},
           {"label", cfg.label}};
    j["tolerances"] = Json::object();
    for (const auto& [key, tol] : cfg.tolerances) j["tolerances"][key] = tol;
    return j;
}

RunConfig load_config(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_text(path));
    } catch (const Json::parse_error& ex) {
        fail("bad-json", std::string("cannot parse ") + path + ": " + ex.what());
    }
    // A manifest embeds the config it was produced from; accept it directly.
    if (j.is_object() && j.contains("config") && j.contains("outputs"))
        return config_from_json(j.at("config"));
    return config_from_json(j);
}

void finalize_config(RunConfig& cfg) {
    if (cfg.out_dir.empty()) {
        if (const char* env = std::getenv("DISKLAB_OUTPUT_DIR"))
            cfg.out_dir = env;
        if (cfg.out_dir.empty()) cfg.out_dir = ".";
    }
    if (cfg.threads == 0) fail("bad-field", "threads must be >= 1");
    if (cfg.n_hi < cfg.n_lo) fail("bad-field", "n_hi must be >= n_lo");
    if (cfg.j_offset < 1) fail("bad-field", "j_offset must be >= 1");
    if (cfg.budget < 1) fail("bad-field", "budget must be >= 1");
    if (cfg.golden_iters < 1) fail("bad-field", "golden_iters must be >= 1");
    if (cfg.series_terms < 10) fail("bad-field", "series_terms must be >= 10");
    if (!(cfg.grid_window > 0.0) || !(cfg.grid_spacing > 0.0))
        fail("bad-field", "grid window and spacing must be > 0");
    if (cfg.grid_base < 16) fail("bad-field", "grid_base must be >= 16");
}

// ------------------------------------------------------------------- CSV

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_.push_back(',');
        text_ += header[i];
    }
    text_.push_back('\n');
}

void CsvTable::begin_row() {
    if (open_ && in_row_ != width_)
        throw std::logic_error("CsvTable: short row");
    if (open_) text_.push_back('\n');
    open_ = true;
    in_row_ = 0;
}

void CsvTable::cell(const std::string& s) {
    if (!open_ || in_row_ >= width_) throw std::logic_error("CsvTable: overflow");
    if (in_row_) text_.push_back(',');
    text_ += s;
    ++in_row_;
    if (in_row_ == width_) {
        text_.push_back('\n');
        open_ = false;
    }
}

void CsvTable::cell(double v) { cell(csv_double(v)); }
void CsvTable::cell(int64_t v) { cell(std::to_string(v)); }
void CsvTable::cell(std::size_t v) { cell(std::to_string(v)); }
void CsvTable::cell(int v) { cell(std::to_string(v)); }

std::string sequence_csv(const GeneratedSequence& seq) {
    CsvTable t({"stage", "index", "re", "im", "abs", "one_minus_abs"});
    for (std::size_t i = 0; i < seq.size(); ++i) {
        t.begin_row();
        t.cell(seq.stage[i]);
        t.cell(seq.index[i]);
        t.cell(seq.points[i].re);
        t.cell(seq.points[i].im);
        const double a = seq.points[i].abs();
        t.cell(a);
        t.cell(1.0 - a);
    }
    return t.text();
}

std::string member_report_csv(const GeneratedSequence& seq,
                              const DiagnosticReport& report) {
    CsvTable t({"n", "k", "re", "im", "phi_lambda", "tail_bound",
                "model_extension", "ratio", "deficit", "slack"});
    for (const ReportRow& row : report.rows) {
        t.begin_row();
        t.cell(seq.stage[row.index]);
        t.cell(seq.index[row.index]);
        t.cell(row.z.re);
        t.cell(row.z.im);
        t.cell(row.density);
        t.cell(row.tail);
        t.cell(row.extension);
        t.cell(row.extension > 0.0 ? row.density / row.extension : 0.0);
        t.cell(row.deficit);
        t.cell(row.slack);
    }
    return t.text();
}

std::string growth_csv(const std::vector<GrowthRow>& rows,
                       const std::vector<double>& cf) {
    std::vector<std::string> header = {
        "n",          "r",           "phi_trunc",       "tail_bound",
        "phi_upper",  "tail_fraction", "model",         "band_ratio",
        "band_ratio_trunc", "scaled_upper", "scaled_trunc"};
    for (double c : cf) {
        header.push_back("psi_inv_cf" + csv_double(c));
        header.push_back("incompat_cf" + csv_double(c));
    }
    header.push_back("flagged");
    CsvTable t(std::move(header));
    for (const GrowthRow& row : rows) {
        t.begin_row();
        t.cell(row.n);
        t.cell(row.r);
        t.cell(row.phi_trunc);
        t.cell(row.tail_bound);
        t.cell(row.phi_upper);
        t.cell(row.tail_fraction);
        t.cell(row.model);
        t.cell(row.band_ratio);
        t.cell(row.band_ratio_trunc);
        t.cell(row.scaled_upper);
        t.cell(row.scaled_trunc);
        for (std::size_t i = 0; i < cf.size(); ++i) {
            t.cell(row.psi_inv[i]);
            t.cell(row.incompat[i]);
        }
        t.cell(row.flagged ? 1 : 0);
    }
    return t.text();
}

std::string trace_csv(const std::vector<DualSearchRow>& trace) {
    CsvTable t({"iteration", "support_size", "objective", "constraint",
                "ratio", "adjusted_index", "coefficient"});
    for (const DualSearchRow& row : trace) {
        t.begin_row();
        t.cell(row.iteration);
        t.cell(row.support);
        t.cell(row.objective);
        t.cell(row.constraint);
        t.cell(row.ratio);
        t.cell(row.adjusted);
        t.cell(row.coeff);
    }
    return t.text();
}

std::string boundary_csv(const ArcWeight& w) {
    CsvTable t({"theta_rad", "value"});
    for (std::size_t i = 0; i < w.breaks.size(); ++i) {
        t.begin_row();
        t.cell(w.breaks[i]);
        t.cell(w.values[i]);
    }
    return t.text();
}

std::string measure_csv(const DiscreteMeasure& nu) {
    CsvTable t({"re", "im", "mass"});
    for (std::size_t i = 0; i < nu.atoms.size(); ++i) {
        t.begin_row();
        t.cell(nu.atoms[i].re);
        t.cell(nu.atoms[i].im);
        t.cell(nu.masses[i]);
    }
    return t.text();
}

void write_text(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("io-error", "cannot open " + path + " for writing");
    out.write(contents.data(), std::streamsize(contents.size()));
    if (!out) fail("io-error", "short write to " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("io-error", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --------------------------------------------------------------- manifest

Json make_manifest(const RunConfig& cfg,
                   const std::vector<std::string>& outputs,
                   const Json& results) {
    return Json{{"tool", "disklab"},
                {"manifest_version", 1},
                {"config", config_to_json(cfg)},
                {"outputs", outputs},
                {"results", results}};
}

void write_manifest(const std::string& path, const Json& manifest) {
    write_text(path, manifest.dump(2) + "\n");
}

} // namespace disklab
