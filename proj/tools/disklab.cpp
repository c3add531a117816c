// disklab: numerical laboratory for interpolation sequences in the unit
// disk.  Subcommands generate sequences, evaluate Blaschke-type densities
// with certified truncation tails, compute Orlicz norms and conjugates,
// sweep measures to the boundary, test harmonic majorants, run the dual
// ratio search, split sequences into comparable halves, and produce the
// combined crowded-sequence report.
//
// Every run writes its outputs together with a manifest recording the
// fully resolved configuration; re-running with --config <manifest>
// reproduces the outputs byte for byte.  Exit codes: 0 success, 1 an
// undecided verdict under --strict, 2 configuration error (with a JSON
// diagnostic on stderr), 3 internal error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "disklab/diagnostics.hpp"
#include "disklab/harmonic.hpp"
#include "disklab/io.hpp"
#include "disklab/orlicz.hpp"
#include "disklab/sequence.hpp"

namespace {

using namespace disklab;

struct RunContext {
    RunConfig cfg;
    std::vector<std::string> outputs;
    Json results = Json::object();
    bool undecided = false;
};

std::string stem_of(const RunContext& rc) {
    return rc.cfg.label.empty() ? rc.cfg.command : rc.cfg.label;
}

void emit(RunContext& rc, const std::string& name, const std::string& text) {
    write_text(rc.cfg.out_dir + "/" + name, text);
    rc.outputs.push_back(name);
}

void finish(RunContext& rc) {
    const Json manifest = make_manifest(rc.cfg, rc.outputs, rc.results);
    const std::string path = rc.cfg.out_dir + "/" + stem_of(rc) + ".manifest.json";
    write_manifest(path, manifest);
    std::cout << rc.results.dump(2) << "\n";
    for (const std::string& out : rc.outputs)
        std::cout << "output: " << rc.cfg.out_dir << "/" << out << "\n";
    std::cout << "manifest: " << path << "\n";
}

GeneratedSequence sequence_of(const RunContext& rc) {
    if (rc.cfg.generator.empty())
        throw ConfigError("missing-field", "this command needs --gen");
    return parse_generator(rc.cfg.generator);
}

// Per-member certified omitted-mass bounds, treating the generated points
// as a truncation of the infinite family.  Pairs/explicit sequences are
// complete and get no tail.
std::vector<double> member_tails(const GeneratedSequence& seq) {
    std::vector<double> tails;
    if (seq.generator.tag == "section6") {
        tails.reserve(seq.size());
        for (const DiskPoint& z : seq.points)
            tails.push_back(
                crowded_tail_bound(seq.generator.eps, z, seq.generator.n_max)
                    .bound);
    } else if (seq.generator.tag == "radial") {
        tails.reserve(seq.size());
        for (const DiskPoint& z : seq.points)
            tails.push_back(radial_tail_mass(seq.generator.q, z.re,
                                             int(seq.generator.count)));
    }
    return tails;
}

double growth_model(const GeneratedSequence& seq, std::size_t i) {
    if (seq.generator.tag != "section6") return 0.0;
    const int n = seq.stage[i];
    const double one_minus_r = std::exp2(double(-n));
    return 4.0 / (one_minus_r * std::pow(std::log(double(n) * std::log(2.0)),
                                         seq.generator.eps));
}

std::string density_csv(const GeneratedSequence& seq,
                        const std::vector<double>& dens,
                        const std::vector<double>& tails) {
    CsvTable t({"n", "k", "re", "im", "phi_lambda", "tail_bound", "model",
                "ratio", "phi_upper"});
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const double tail = tails.empty() ? 0.0 : tails[i];
        const double model = growth_model(seq, i);
        t.begin_row();
        t.cell(seq.stage[i]);
        t.cell(seq.index[i]);
        t.cell(seq.points[i].re);
        t.cell(seq.points[i].im);
        t.cell(dens[i]);
        t.cell(tail);
        t.cell(model);
        t.cell(model > 0.0 ? (dens[i] + tail) / model : 0.0);
        t.cell(dens[i] + tail);
    }
    return t.text();
}

// ------------------------------------------------------------- subcommands

void cmd_generate(RunContext& rc) {
    const GeneratedSequence seq = sequence_of(rc);
    emit(rc, stem_of(rc) + ".csv", sequence_csv(seq));
    emit(rc, stem_of(rc) + ".json", sequence_to_json(seq).dump(2) + "\n");
    rc.results["count"] = seq.size();
    rc.results["blaschke_sum"] = blaschke_sum(seq.points);
    rc.results["separation"] = separation_constant(seq.points, rc.cfg.threads);
}

void cmd_phi_lambda(RunContext& rc) {
    const GeneratedSequence seq = sequence_of(rc);
    const std::vector<double> dens =
        all_member_densities(seq.points, rc.cfg.threads);
    const std::vector<double> tails = member_tails(seq);
    emit(rc, stem_of(rc) + ".csv", density_csv(seq, dens, tails));
    double sup = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < dens.size(); ++i)
        if (dens[i] > sup) {
            sup = dens[i];
            at = i;
        }
    rc.results["count"] = seq.size();
    rc.results["sup_phi"] = sup;
    rc.results["argmax"] = at;
}

void cmd_carleson(RunContext& rc) {
    const GeneratedSequence seq = sequence_of(rc);
    const std::vector<double> dens =
        all_member_densities(seq.points, rc.cfg.threads);
    const std::vector<double> tails = member_tails(seq);
    double growth_tol = 1.1;
    if (auto it = rc.cfg.tolerances.find("growth_tol");
        it != rc.cfg.tolerances.end())
        growth_tol = it->second;
    const CarlesonResult res =
        carleson_check(seq, tails, growth_tol, rc.cfg.threads);
    emit(rc, stem_of(rc) + ".csv", density_csv(seq, dens, tails));
    rc.results["verdict"] = res.verdict;
    rc.results["inf_abs_b"] = res.inf_abs_b;
    rc.results["sup_phi"] = res.sup_density;
    rc.results["argmax"] = res.argmax;
    rc.results["inf_abs_b_completed"] = res.inf_abs_b_completed;
    rc.results["sup_phi_completed"] = res.sup_density_completed;
    rc.results["half_sup_phi"] = res.half_sup_density;
    rc.results["growth_tol"] = growth_tol;
}

void cmd_orlicz_norm(RunContext& rc) {
    const OrliczShape shape = parse_shape(rc.cfg.shape);
    if (rc.cfg.weight.empty())
        throw ConfigError("missing-field", "orlicz-norm needs --weight");
    const WeightSpec spec = parse_weight(rc.cfg.weight);
    GeneratedSequence seq;
    if (spec.kind == "shadow") seq = sequence_of(rc);
    const ArcWeight w = resolve_weight(spec, seq);
    const WeightedSamples samples = samples_of(w);
    const double lux = luxemburg_norm(shape, samples);
    const double amemiya = amemiya_norm(shape, samples);
    WeightedSamples at_norm = samples;
    if (lux > 0.0)
        for (double& v : at_norm.value) v /= lux;
    emit(rc, stem_of(rc) + ".csv", boundary_csv(w));
    rc.results["luxemburg"] = lux;
    rc.results["amemiya"] = amemiya;
    rc.results["modular_at_norm"] = lux > 0.0 ? modular(shape, at_norm) : 0.0;
    rc.results["mean"] = arc_mean(w);
    rc.results["arcs"] = w.breaks.size();
}

void cmd_conjugate(RunContext& rc) {
    const OrliczShape base = parse_shape(rc.cfg.shape);
    const OrliczShape conj = conjugate(base);
    // Sample along achieved slopes s = phi'(t) so every conjugate value is
    // finite; stop before the value cap.
    double t_hi = 1.0;
    while (t_hi < 1e8 && base.value(2.0 * t_hi) < 1e100) t_hi *= 2.0;
    const double t_lo = 1e-4;
    const int grid = 481;
    CsvTable t({"t", "slope", "base_value", "conj_value", "young_gap"});
    for (int i = 0; i < grid; ++i) {
        const double x =
            t_lo * std::pow(t_hi / t_lo, double(i) / double(grid - 1));
        const double s = base.rderiv(x);
        const double cv = conj.value(s);
        if (!std::isfinite(s) || !std::isfinite(cv)) continue;
        t.begin_row();
        t.cell(x);
        t.cell(s);
        t.cell(base.value(x));
        t.cell(cv);
        t.cell(cv - (s * x - base.value(x)));
    }
    emit(rc, stem_of(rc) + ".csv", t.text());
    rc.results["base"] = base.describe();
    rc.results["base_splice"] = base.splice_point();
    rc.results["conj_splice"] = conj.splice_point();
    rc.results["conj_at_1"] = conj.value(1.0);
    rc.results["conj_at_2"] = conj.value(2.0);
    rc.results["conj_at_4"] = conj.value(4.0);
}

DiscreteMeasure measure_of(const RunContext& rc) {
    if (!rc.cfg.measure.empty()) {
        Json j;
        try {
            j = Json::parse(read_text(rc.cfg.measure));
        } catch (const Json::parse_error& ex) {
            throw ConfigError("bad-json", std::string("cannot parse ") +
                                              rc.cfg.measure + ": " + ex.what());
        }
        return measure_from_json(j);
    }
    if (rc.cfg.atoms.empty() || rc.cfg.masses.empty())
        throw ConfigError("missing-field",
                          "balayage needs --measure or --atoms with --masses");
    const GeneratedSequence pts = parse_generator("points:" + rc.cfg.atoms);
    std::vector<double> masses;
    for (const std::string& piece : [&] {
             std::vector<std::string> out;
             std::string cur;
             for (char ch : rc.cfg.masses) {
                 if (ch == ',') {
                     out.push_back(cur);
                     cur.clear();
                 } else {
                     cur.push_back(ch);
                 }
             }
             out.push_back(cur);
             return out;
         }()) {
        try {
            masses.push_back(std::stod(piece));
        } catch (const std::exception&) {
            throw ConfigError("bad-number", "mass '" + piece + "'");
        }
    }
    return make_measure(pts.points, std::move(masses));
}

BoundaryGridOptions grid_options(const RunConfig& cfg) {
    return BoundaryGridOptions{cfg.grid_base, cfg.grid_window,
                               cfg.grid_spacing, cfg.grid_gauss2, cfg.threads};
}

void cmd_balayage(RunContext& rc) {
    const OrliczShape shape = parse_shape(rc.cfg.shape);
    const OrliczShape conj = conjugate(shape);
    const DiscreteMeasure nu = measure_of(rc);
    const BoundaryGrid grid = boundary_grid(nu, grid_options(rc.cfg));
    const WeightedSamples vals = balayage_samples(nu, grid, rc.cfg.threads);
    CsvTable t({"theta_rad", "cell_mass", "balayage"});
    for (std::size_t i = 0; i < grid.theta.size(); ++i) {
        t.begin_row();
        t.cell(grid.theta[i]);
        t.cell(grid.mass[i]);
        t.cell(vals.value[i]);
    }
    emit(rc, stem_of(rc) + ".csv", t.text());
    emit(rc, stem_of(rc) + "_measure.csv", measure_csv(nu));
    double total = 0.0;
    for (double m : nu.masses) total += m;
    rc.results["atoms"] = nu.atoms.size();
    rc.results["total_mass"] = total;
    rc.results["grid_points"] = grid.theta.size();
    rc.results["dual_luxemburg"] = luxemburg_norm(conj, vals);
    rc.results["dual_amemiya"] = amemiya_norm(conj, vals);
}

void cmd_majorant_check(RunContext& rc) {
    const GeneratedSequence seq = sequence_of(rc);
    if (rc.cfg.weight.empty())
        throw ConfigError("missing-field", "majorant-check needs --weight");
    const WeightSpec spec = parse_weight(rc.cfg.weight);
    const ArcWeight w = resolve_weight(spec, seq);
    const std::vector<double> tails = member_tails(seq);
    const DiagnosticReport rep = majorant_check(seq, w, tails, rc.cfg.threads);
    emit(rc, stem_of(rc) + ".csv", member_report_csv(seq, rep));
    emit(rc, stem_of(rc) + "_weight.csv", boundary_csv(w));
    rc.results["verdict"] = rep.verdict;
    rc.results["min_deficit"] = rep.min_deficit;
    rc.results["min_slack"] = rep.min_slack;
    rc.results["inf_abs_b"] = rep.inf_abs_b;
    rc.results["sup_phi"] = rep.sup_density;
    rc.results["separation"] = rep.separation;
    if (spec.kind == "shadow") {
        const ArcWeight unit = shadow_weight(seq, 1.0, spec.c);
        const MinimalScale min = minimal_shadow_scale(seq, unit, rc.cfg.threads);
        rc.results["minimal_c0"] = min.c0;
        rc.results["minimal_c0_at"] = min.at;
    }
}

void cmd_condition_d(RunContext& rc) {
    const GeneratedSequence seq = sequence_of(rc);
    const OrliczShape shape = parse_shape(rc.cfg.shape);
    const std::vector<double> dens =
        all_member_densities(seq.points, rc.cfg.threads);
    DualSearchOptions opts;
    opts.budget = rc.cfg.budget;
    opts.golden_iters = rc.cfg.golden_iters;
    opts.grid = grid_options(rc.cfg);
    opts.threads = rc.cfg.threads;
    const DualSearchResult res = dual_ratio_search(seq, shape, dens, opts);
    emit(rc, stem_of(rc) + ".csv", trace_csv(res.trace));
    rc.results["ratio"] = res.ratio;
    rc.results["objective"] = res.objective;
    rc.results["constraint"] = res.constraint;
    rc.results["support_size"] = res.support.size();
    rc.results["iterations"] = res.trace.size();
}

void cmd_hoffman(RunContext& rc) {
    const GeneratedSequence seq = sequence_of(rc);
    const double sep = separation_constant(seq.points, rc.cfg.threads);
    const double delta = rc.cfg.delta > 0.0 ? rc.cfg.delta : sep;
    const SplitResult split = comparable_split(seq, delta, rc.cfg.threads);
    ComparabilityOptions copts;
    copts.threads = rc.cfg.threads;
    const ComparabilityEstimate est =
        comparability_verify(seq, split, delta, copts);
    CsvTable t({"part", "position", "seq_index", "n", "k", "re", "im"});
    for (int part = 0; part < 2; ++part)
        for (std::size_t pos = 0; pos < split.parts[part].size(); ++pos) {
            const std::size_t i = split.parts[part][pos];
            t.begin_row();
            t.cell(part);
            t.cell(pos);
            t.cell(i);
            t.cell(seq.stage[i]);
            t.cell(seq.index[i]);
            t.cell(seq.points[i].re);
            t.cell(seq.points[i].im);
        }
    emit(rc, stem_of(rc) + ".csv", t.text());
    rc.results["separation"] = sep;
    rc.results["delta"] = delta;
    rc.results["separation_part0"] = split.separation_part[0];
    rc.results["separation_part1"] = split.separation_part[1];
    rc.results["b"] = est.b;
    rc.results["alpha"] = est.alpha;
    rc.results["a"] = est.a;
    rc.results["c"] = est.c;
    rc.results["eta"] = est.eta;
    rc.results["b_refined"] = est.b_refined;
    rc.results["grid_size"] = est.grid_size;
    rc.results["fit_ok"] = est.fit_ok;
    rc.results["verify_ok"] = est.verify_ok;
    rc.undecided = !est.fit_ok || !est.verify_ok;
}

void cmd_section6_report(RunContext& rc) {
    CrowdedReportOptions opts;
    opts.eps = rc.cfg.epsilon;
    opts.n_lo = rc.cfg.n_lo;
    opts.n_hi = rc.cfg.n_hi;
    opts.j_offset = rc.cfg.j_offset;
    opts.cf = rc.cfg.cf;
    opts.series_terms = rc.cfg.series_terms;
    opts.threads = rc.cfg.threads;
    const CrowdedReport rep = crowded_report(opts);
    emit(rc, stem_of(rc) + ".csv", growth_csv(rep.rows, opts.cf));
    Json verdicts = Json::object();
    for (const auto& [key, value] : rep.verdicts) verdicts[key] = value;
    rc.results["verdicts"] = verdicts;
    rc.results["separation"] = rep.separation;
    rc.results["inf_abs_b"] = rep.carleson.inf_abs_b;
    rc.results["sup_phi"] = rep.carleson.sup_density;
    rc.results["half_sup_phi"] = rep.carleson.half_sup_density;
    rc.results["series_half"] =
        Json{{"verdict", rep.shadow_half.verdict},
             {"value_lo", rep.shadow_half.value_lo},
             {"value_hi", rep.shadow_half.value_hi},
             {"bracket_width", rep.shadow_half.bracket_width}};
    rc.results["series_full"] =
        Json{{"verdict", rep.shadow_full.verdict},
             {"partial_sum", rep.shadow_full.partial_sum},
             {"log_k_exceed", rep.shadow_full.log_k_exceed}};
    rc.undecided = rep.shadow_half.verdict == "undecided" ||
                   rep.shadow_full.verdict == "undecided";
}

// ------------------------------------------------------------------- main

// "LO..HI" or a single stage number.
void parse_stage_range(const std::string& text, RunConfig& cfg) {
    const std::size_t dots = text.find("..");
    try {
        if (dots == std::string::npos) {
            cfg.n_lo = cfg.n_hi = std::stoi(text);
        } else {
            cfg.n_lo = std::stoi(text.substr(0, dots));
            cfg.n_hi = std::stoi(text.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw ConfigError("bad-field", "stage range '" + text + "'");
    }
}

int run(int argc, char** argv) {
    RunContext rc;

    // The config file is applied before flag binding so that explicit
    // flags override it; CLI11 then just sees it as a consumed string.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config")
            rc.cfg = load_config(argv[i + 1]);
    RunConfig& cfg = rc.cfg;

    CLI::App app{"numerical laboratory for disk interpolation sequences"};
    app.require_subcommand(1);
    // Let --out/--threads/... appear after the subcommand name as well.
    app.fallthrough();
    std::string config_path, stage_range;
    app.add_option("--config", config_path, "JSON config or manifest to load");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--label", cfg.label, "output filename stem");
    app.add_option("--threads", cfg.threads, "worker threads");
    app.add_flag("--strict", cfg.strict, "exit 1 on undecided verdicts");

    const auto add_gen = [&](CLI::App* sub) {
        sub->add_option("--gen", cfg.generator,
                        "sequence spec: section6:EPS,NMAX | radial:Q,COUNT | "
                        "pairs:Q,COUNT,ETA | points:re,im;...");
    };
    const auto add_shape = [&](CLI::App* sub) {
        sub->add_option("--shape", cfg.shape,
                        "shape spec: power:P | psi:E | loglog:E | linear | "
                        "table:t,v;...");
    };
    const auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid-base", cfg.grid_base, "boundary base points");
        sub->add_option("--grid-window", cfg.grid_window,
                        "refine window in units of 1-|atom|");
        sub->add_option("--grid-spacing", cfg.grid_spacing,
                        "refine knots per 1-|atom|");
        sub->add_flag("--gauss2", cfg.grid_gauss2, "two-point Gauss cells");
    };

    CLI::App* generate = app.add_subcommand("generate", "emit a sequence");
    add_gen(generate);

    CLI::App* phi = app.add_subcommand("phi-lambda", "per-member densities");
    add_gen(phi);

    CLI::App* carleson =
        app.add_subcommand("carleson", "uniform separation check");
    add_gen(carleson);
    carleson->add_option_function<double>(
        "--growth-tol",
        [&cfg](double v) { cfg.tolerances["growth_tol"] = v; },
        "half-vs-full sup growth tolerance");

    CLI::App* onorm = app.add_subcommand("orlicz-norm", "Luxemburg norm");
    add_shape(onorm);
    add_gen(onorm);
    onorm->add_option("--weight", cfg.weight,
                      "weight spec: indicator:A | const:V | shadow:C0,C");

    CLI::App* conj = app.add_subcommand("conjugate", "conjugate shape table");
    add_shape(conj);

    CLI::App* balayage =
        app.add_subcommand("balayage", "sweep a measure to the boundary");
    add_shape(balayage);
    add_grid(balayage);
    balayage->add_option("--measure", cfg.measure, "measure JSON file");
    balayage->add_option("--atoms", cfg.atoms, "inline atoms re,im;re,im;...");
    balayage->add_option("--masses", cfg.masses, "inline masses m,m,...");

    CLI::App* majorant =
        app.add_subcommand("majorant-check", "harmonic majorant test");
    add_gen(majorant);
    majorant->add_option("--weight", cfg.weight,
                         "weight spec: indicator:A | const:V | shadow:C0,C");

    CLI::App* condd =
        app.add_subcommand("condition-d", "dual ratio search lower bound");
    add_gen(condd);
    add_shape(condd);
    add_grid(condd);
    condd->add_option("--budget", cfg.budget, "coordinate adjustments");
    condd->add_option("--golden-iters", cfg.golden_iters,
                      "line-search iterations");

    CLI::App* hoffman =
        app.add_subcommand("hoffman", "comparable two-part split");
    add_gen(hoffman);
    hoffman->add_option("--delta", cfg.delta,
                        "separation parameter (default: measured)");

    CLI::App* report =
        app.add_subcommand("section6-report", "combined crowded report");
    report->add_option("--epsilon", cfg.epsilon, "crowding exponent");
    report->add_option("--n", stage_range, "stage range LO..HI");
    report->add_option("--j-offset", cfg.j_offset, "truncation stage offset");
    report->add_option("--cf", cfg.cf, "point-rule mass constants");
    report->add_option("--series-terms", cfg.series_terms,
                       "membership series terms");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        const Json diag{{"error", "cli"}, {"detail", e.what()}};
        std::cerr << diag.dump() << "\n";
        return 2;
    }

    if (!stage_range.empty()) parse_stage_range(stage_range, cfg);
    if (generate->parsed()) cfg.command = "generate";
    if (phi->parsed()) cfg.command = "phi-lambda";
    if (carleson->parsed()) cfg.command = "carleson";
    if (onorm->parsed()) cfg.command = "orlicz-norm";
    if (conj->parsed()) cfg.command = "conjugate";
    if (balayage->parsed()) cfg.command = "balayage";
    if (majorant->parsed()) cfg.command = "majorant-check";
    if (condd->parsed()) cfg.command = "condition-d";
    if (hoffman->parsed()) cfg.command = "hoffman";
    if (report->parsed()) cfg.command = "section6-report";

    finalize_config(cfg);
    std::filesystem::create_directories(cfg.out_dir);

    if (cfg.command == "generate") cmd_generate(rc);
    else if (cfg.command == "phi-lambda") cmd_phi_lambda(rc);
    else if (cfg.command == "carleson") cmd_carleson(rc);
    else if (cfg.command == "orlicz-norm") cmd_orlicz_norm(rc);
    else if (cfg.command == "conjugate") cmd_conjugate(rc);
    else if (cfg.command == "balayage") cmd_balayage(rc);
    else if (cfg.command == "majorant-check") cmd_majorant_check(rc);
    else if (cfg.command == "condition-d") cmd_condition_d(rc);
    else if (cfg.command == "hoffman") cmd_hoffman(rc);
    else if (cfg.command == "section6-report") cmd_section6_report(rc);
    else throw ConfigError("bad-command", "unknown command " + cfg.command);

    finish(rc);
    if (rc.undecided && cfg.strict) {
        std::cerr << Json{{"error", "undecided"},
                          {"detail", "verdict undecided under --strict"}}
                         .dump()
                  << "\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << e.diagnostic().dump() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << Json{{"error", "invalid-argument"}, {"detail", e.what()}}
                         .dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", "internal"}, {"detail", e.what()}}.dump()
                  << "\n";
        return 3;
    }
}
