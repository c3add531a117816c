#include <string>

#include "doctest.h"

#include "disklab/io.hpp"

using namespace disklab;

TEST_CASE("sequence JSON round trip preserves generator provenance") {
    const GeneratedSequence seq = gen_crowded(1.0, 6);
    const Json j = sequence_to_json(seq);
    CHECK(j.at("generator").at("tag") == "section6");
    CHECK(j.at("generator").at("eps") == 1.0);
    CHECK(j.at("generator").at("n_max") == 6);
    const GeneratedSequence back = sequence_from_json(j);
    REQUIRE(back.size() == seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(back.points[i].re == seq.points[i].re); // regenerated, bitwise
        CHECK(back.points[i].im == seq.points[i].im);
        CHECK(back.stage[i] == seq.stage[i]);
    }
}

TEST_CASE("explicit sequences survive serialisation exactly") {
    const GeneratedSequence seq =
        gen_explicit({disk_point(0.123456789012345, -0.5),
                      disk_point(-0.9999, 1e-17)});
    const std::string text = sequence_to_json(seq).dump();
    const GeneratedSequence back = sequence_from_json(Json::parse(text));
    REQUIRE(back.size() == 2);
    CHECK(back.points[0].re == seq.points[0].re); // shortest repr round trip
    CHECK(back.points[1].im == seq.points[1].im);
    CHECK(back.generator.tag == "explicit");
}

TEST_CASE("weight and measure codecs") {
    const ArcWeight w = make_arc_weight({0.0, 1.5}, {2.0, 0.0});
    const ArcWeight wb = arc_weight_from_json(arc_weight_to_json(w));
    CHECK(wb.breaks == w.breaks);
    CHECK(wb.values == w.values);
    CHECK_THROWS_AS(arc_weight_from_json(Json{{"breaks", {3.0, 1.0}},
                                              {"values", {1.0, 1.0}}}),
                    ConfigError);

    const DiscreteMeasure nu =
        make_measure({disk_point(0.5, 0.25)}, {0.75});
    const DiscreteMeasure nb = measure_from_json(measure_to_json(nu));
    CHECK(nb.atoms[0].re == 0.5);
    CHECK(nb.masses[0] == 0.75);
    CHECK_THROWS_AS(measure_from_json(Json{{"atoms", {{1.5, 0.0}}},
                                           {"masses", {1.0}}}),
                    ConfigError);
}

TEST_CASE("shape specs parse and reject") {
    CHECK(parse_shape("psi:1").describe() == "psi:1");
    CHECK(parse_shape("power:2.5").value(1.0) == doctest::Approx(1.0));
    CHECK(parse_shape("linear").value(3.0) == doctest::Approx(3.0));
    CHECK(parse_shape("table:1,1;2,3").value(1.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_shape("psi"), ConfigError);
    CHECK_THROWS_AS(parse_shape("power:0.5"), ConfigError);
    CHECK_THROWS_AS(parse_shape("gauss:2"), ConfigError);
    CHECK_THROWS_AS(parse_shape("psi:abc"), ConfigError);
}

TEST_CASE("generator specs parse and reject") {
    CHECK(parse_generator("radial:0.5,4").size() == 4);
    CHECK(parse_generator("section6:1,5").generator.tag == "section6");
    CHECK(parse_generator("pairs:0.5,3,2.0").size() == 6);
    CHECK(parse_generator("points:0.1,0.2;-0.3,0.0").size() == 2);
    CHECK_THROWS_AS(parse_generator("radial:0.5"), ConfigError);
    CHECK_THROWS_AS(parse_generator("spiral:1,2"), ConfigError);
    CHECK_THROWS_AS(parse_generator("points:2.0,0.0"), ConfigError);
}

TEST_CASE("weight specs parse and resolve") {
    const WeightSpec ind = parse_weight("indicator:0.1");
    CHECK(ind.kind == "indicator");
    const ArcWeight w = resolve_weight(ind, GeneratedSequence{});
    CHECK(arc_value_at(w, 0.1) == 1.0);
    CHECK(arc_value_at(w, 1.0) == 0.0);
    CHECK(arc_mean(w) == doctest::Approx(0.1).epsilon(1e-12));
    const ArcWeight full =
        resolve_weight(parse_weight("indicator:1"), GeneratedSequence{});
    CHECK(arc_value_at(full, 3.0) == 1.0);
    CHECK_THROWS_AS(parse_weight("indicator:0"), ConfigError);
    CHECK_THROWS_AS(parse_weight("indicator:1.5"), ConfigError);
    CHECK_THROWS_AS(parse_weight("shadow:1"), ConfigError);
    CHECK_THROWS_AS(parse_weight("rect:1"), ConfigError);
    // Shadow weights need sequence context.
    CHECK_THROWS_AS(resolve_weight(parse_weight("shadow:1,1"),
                                   GeneratedSequence{}),
                    ConfigError);
}

TEST_CASE("config parsing is strict") {
    const Json good{{"schema_version", 1}, {"command", "carleson"},
                    {"generator", "radial:0.5,30"}, {"threads", 2}};
    const RunConfig cfg = config_from_json(good);
    CHECK(cfg.command == "carleson");
    CHECK(cfg.generator == "radial:0.5,30");
    CHECK(cfg.threads == 2);

    CHECK_THROWS_AS(config_from_json(Json{{"schema_version", 1},
                                          {"bogus", 3}}),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json(Json{{"schema_version", 2}}),
                    ConfigError);
    CHECK_THROWS_AS(config_from_json(Json{{"schema_version", 1},
                                          {"epsilon", "one"}}),
                    ConfigError);
    CHECK_THROWS_AS(
        config_from_json(Json{{"schema_version", 1},
                              {"tolerances", Json{{"phi", 0.0}}}}),
        ConfigError);
    CHECK_THROWS_AS(config_from_json(Json::array()), ConfigError);
}

TEST_CASE("config diagnostics are machine readable") {
    try {
        config_from_json(Json{{"schema_version", 1}, {"mystery", 1}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.diagnostic().at("error") == "unknown-field");
        const std::string detail = e.diagnostic().at("detail");
        CHECK(detail.find("mystery") != std::string::npos);
    }
}

TEST_CASE("config round trip is the identity on JSON dumps") {
    RunConfig cfg;
    cfg.command = "section6-report";
    cfg.epsilon = 1.0;
    cfg.n_lo = 8;
    cfg.n_hi = 14;
    cfg.tolerances["band"] = 0.5;
    const Json j = config_to_json(cfg);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back).dump() == j.dump());
}

TEST_CASE("finalize validates cross-field constraints") {
    RunConfig cfg;
    cfg.out_dir = "/tmp";
    cfg.threads = 0;
    CHECK_THROWS_AS(finalize_config(cfg), ConfigError);
    cfg.threads = 1;
    cfg.n_lo = 10;
    cfg.n_hi = 8;
    CHECK_THROWS_AS(finalize_config(cfg), ConfigError);
    cfg.n_hi = 12;
    finalize_config(cfg); // now fine
    CHECK(cfg.out_dir == "/tmp");
}

TEST_CASE("csv formatting is deterministic and round-trip exact") {
    CHECK(csv_double(0.1) == "0.10000000000000001");
    CHECK(csv_double(1.0) == "1");
    CHECK(csv_double(-2.5e-17) == "-2.4999999999999999e-17");
    const GeneratedSequence seq = gen_radial(0.5, 6);
    const std::string a = sequence_csv(seq);
    const std::string b = sequence_csv(seq);
    CHECK(a == b);
    CHECK(a.substr(0, a.find('\n')) ==
          "stage,index,re,im,abs,one_minus_abs");
    // One header plus one line per point.
    std::size_t lines = 0;
    for (char ch : a)
        if (ch == '\n') ++lines;
    CHECK(lines == seq.size() + 1);
}

TEST_CASE("csv table guards against ragged rows") {
    CsvTable t({"a", "b"});
    t.begin_row();
    t.cell(1.0);
    CHECK_THROWS_AS(t.begin_row(), std::logic_error);
}

TEST_CASE("manifest embeds the config and is reloadable") {
    RunConfig cfg;
    cfg.command = "generate";
    cfg.generator = "radial:0.5,5";
    cfg.out_dir = "/tmp";
    const Json man = make_manifest(cfg, {"generate.csv"}, Json{{"count", 5}});
    CHECK(man.at("config").at("generator") == "radial:0.5,5");
    CHECK(man.at("outputs")[0] == "generate.csv");
    const std::string path = "/tmp/disklab_test_manifest.json";
    write_manifest(path, man);
    const RunConfig back = load_config(path);
    CHECK(back.generator == "radial:0.5,5");
    CHECK(back.command == "generate");
}

TEST_CASE("growth csv lists one column pair per mass constant") {
    const auto rows = growth_vs_pointeval(1.0, 8, 9, 8, std::vector<double>{1.0, 10.0});
    const std::string csv = growth_csv(rows, {1.0, 10.0});
    const std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header.find("psi_inv_cf1") != std::string::npos);
    CHECK(header.find("incompat_cf10") != std::string::npos);
    CHECK(header.find("tail_bound") != std::string::npos);
}
