#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fodkit/commands.hpp"
#include "fodkit/config.hpp"
#include "fodkit/io.hpp"
#include "fodkit/report.hpp"

using namespace fodkit;

namespace {

const std::filesystem::path data_dir = FODKIT_DATA_DIR;

std::size_t parse_error_line(std::string_view text) {
    try {
        (void)io::parse_dataset_text(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

RunConfig reference_run_config() {
    RunConfig cfg = parse_config(data_dir / "reference_scenario.cfg");
    cfg.input = (data_dir / "reference_readings.csv").string();
    return cfg;
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("fodkit_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

} // namespace

TEST(ParseDataset, Fixture) {
    const SensorDataset ds = io::parse_dataset(data_dir / "reference_readings.csv");
    EXPECT_EQ(ds.sensors(), 6u);
    EXPECT_EQ(ds.measurements(), 5u);
    EXPECT_EQ(ds.at(0, 0), 10.28);
    EXPECT_EQ(ds.sensor_ids().front(), "1#");
}

TEST(ParseDataset, EmptyFileFailsAtLineOne) {
    EXPECT_EQ(parse_error_line(""), 1u);
    EXPECT_EQ(parse_error_line("\n\n"), 1u);
}

TEST(ParseDataset, SingleColumnIsInsufficient) {
    try {
        (void)io::parse_dataset_text("a\n1\n2\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1u);
        EXPECT_NE(std::string(e.what()).find("insufficient sensors"), std::string::npos);
    }
}

TEST(ParseDataset, ReportsOffendingLine) {
    EXPECT_EQ(parse_error_line("a,b\n1,2\n3\n"), 3u);
    EXPECT_EQ(parse_error_line("a,b\n1,2\n3,x\n"), 3u);
    EXPECT_EQ(parse_error_line("a,b\n1,2\n\n3,-4\n"), 4u);
    EXPECT_EQ(parse_error_line("a,b\n1,2\n"), 2u);
}

TEST(ParseDataset, ToleratesBomCrlfAndBlankLines) {
    const SensorDataset ds = io::parse_dataset_text("\xEF\xBB\xBF" "a, b\r\n1.5, 2\r\n\r\n3,4.25\r\n");
    EXPECT_EQ(ds.sensor_ids(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(ds.rows(), (std::vector<std::vector<double>>{{1.5, 2}, {3, 4.25}}));
}

TEST(ParseDataset, WriteParseRoundTrip) {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> v(0.0, 1000.0);
    std::uniform_int_distribution<int> dim(2, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const int sensors = dim(rng), readings = dim(rng);
        std::vector<std::string> ids;
        for (int i = 0; i < sensors; ++i)
            ids.push_back("s" + std::to_string(i));
        std::vector<std::vector<double>> rows(readings, std::vector<double>(sensors));
        for (auto& r : rows)
            for (auto& x : r)
                x = v(rng);
        const SensorDataset ds(ids, rows);
        EXPECT_EQ(io::parse_dataset_text(io::write_dataset(ds)), ds);
    }
}

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(io::format_number(10.74), "10.74");
    EXPECT_EQ(io::format_number(0.003), "0.003");
    EXPECT_EQ(io::format_number(-0.0), "0");
    EXPECT_EQ(io::format_number(5.0), "5");
}

TEST(Config, ParsesReferenceScenario) {
    const RunConfig cfg = parse_config(data_dir / "reference_scenario.cfg");
    EXPECT_EQ(cfg.nu, 0.5);
    EXPECT_EQ(cfg.target_std, 0.005);
    EXPECT_EQ(cfg.target_gain, 6.25);
    ASSERT_TRUE(cfg.schedule);
    EXPECT_EQ(*cfg.schedule, (std::vector<double>{0.01, 0.005, 0.003}));
}

TEST(Config, RejectsUnknownKeyWithLine) {
    try {
        (void)parse_config_text("nu = 0.5\n# comment\nbogus = 1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW((void)parse_config_text("nu 0.5\n"), ParseError);
    EXPECT_THROW((void)parse_config_text("nu = half\n"), ParseError);
}

TEST(Config, ExactlyOneGainSource) {
    RunConfig both = parse_config_text("target_gain = 2\ndistance = 100\nsegment = 100\nattenuation = 0.5\n");
    EXPECT_THROW((void)gain_target(both), ParseError);
    RunConfig none;
    EXPECT_THROW((void)gain_target(none), ParseError);
    RunConfig partial = parse_config_text("distance = 100\n");
    EXPECT_THROW((void)gain_target(partial), ParseError);
    RunConfig link = parse_config_text("distance = 200\nsegment = 100\nattenuation = 0.5\n");
    EXPECT_DOUBLE_EQ(gain_target(link).value, 4.0);
    EXPECT_TRUE(gain_target(link).link.has_value());
}

TEST(Config, MergeOverrides) {
    RunConfig base = parse_config_text("nu = 0.5\ntarget_std = 0.005\n");
    RunConfig over = parse_config_text("nu = 0.7\n");
    base.merge(over);
    EXPECT_EQ(base.nu, 0.7);
    EXPECT_EQ(base.target_std, 0.005);
}

TEST(Report, CsvQuoting) {
    Table t{"x", {"a", "b"}, {}};
    t.add({"plain", "has,comma"});
    t.add({"say \"hi\"", "1"});
    EXPECT_EQ(t.render(','), "a,b\nplain,\"has,comma\"\n\"say \"\"hi\"\"\",1\n");
}

TEST(Report, SpectraColumnsMonotoneWithUnitAtOne) {
    std::vector<double> omegas;
    for (int i = 0; i <= 100; ++i)
        omegas.push_back(0.1 * i);
    const std::vector<double> orders{0.2, 0.5, 0.8, 1.0};
    const auto [amp, phase] = spectra_plots(orders, omegas);
    ASSERT_EQ(amp.header.size(), 5u);
    ASSERT_EQ(amp.rows.size(), 101u);
    for (std::size_t c = 1; c <= 4; ++c) {
        for (std::size_t r = 1; r < amp.rows.size(); ++r)
            EXPECT_LE(std::stod(amp.rows[r - 1][c]), std::stod(amp.rows[r][c]));
        EXPECT_EQ(amp.rows[10][0], "1");
        EXPECT_EQ(amp.rows[10][c], "1");
    }
}

TEST(StepPolylines, CoarserStepsDeviateMore) {
    const PolynomialModel quad({1.0, 2.0, -1.5});
    const double h = 0.01;
    const std::vector<double> steps{h, 2 * h, 4 * h};
    const StepPolylines d = render_step_polylines(quad, FractionalOrder(0.5), steps, 0.2, 0.6);
    ASSERT_EQ(d.polylines.size(), 3u);
    std::vector<double> worst;
    for (const auto& line : d.polylines) {
        double w = 0.0;
        for (std::size_t i = 0; i < d.x.size(); ++i)
            w = std::max(w, std::abs(line[i] - d.reference[i]));
        worst.push_back(w);
    }
    EXPECT_LE(worst[0], worst[1]);
    EXPECT_LE(worst[1], worst[2]);
}

TEST(StepPolylines, SingleStepAndIdentity) {
    const PolynomialModel quad({1.0, 2.0, -1.5});
    const std::vector<double> one{0.01};
    const Table t = step_polyline_plot(render_step_polylines(quad, FractionalOrder(0.5), one, 0.2, 0.6));
    EXPECT_EQ(t.header, (std::vector<std::string>{"x", "reference", "h=0.01"}));

    const std::vector<double> steps{0.01, 0.02, 0.05};
    const StepPolylines id = render_step_polylines(quad, FractionalOrder(0.0), steps, 0.2, 0.6);
    for (const auto& line : id.polylines)
        for (std::size_t i = 0; i < id.x.size(); ++i) {
            EXPECT_DOUBLE_EQ(line[i], quad(id.x[i]));
            EXPECT_NEAR(id.reference[i], quad(id.x[i]), 1e-12);
        }
}

TEST(Commands, RunReferenceScenario) {
    const auto result = cli::cmd_run(reference_run_config());
    ASSERT_EQ(result.code, cli::exit_ok) << result.message;
    const Table* summary = result.bundle.table("summary");
    ASSERT_NE(summary, nullptr);
    auto value = [&](const std::string& key) {
        for (const auto& row : summary->rows)
            if (row[0] == key)
                return row[1];
        return std::string();
    };
    EXPECT_EQ(value("h"), "0.003");
    EXPECT_EQ(value("m"), "5");
    EXPECT_FALSE(value("total_gain").empty());
}

TEST(Commands, PlanExactPower) {
    RunConfig cfg;
    cfg.target_gain = 8.0;
    const auto result = cli::cmd_plan(cfg, 2.0);
    ASSERT_EQ(result.code, cli::exit_ok);
    const Table* plan = result.bundle.table("plan");
    ASSERT_NE(plan, nullptr);
    EXPECT_EQ(plan->rows.at(0).at(2), "3");
}

TEST(Commands, ExitCodes) {
    RunConfig cfg = reference_run_config();
    cfg.target_std = 1e-7;
    EXPECT_EQ(cli::cmd_run(cfg).code, cli::exit_precision_unreachable);
    EXPECT_EQ(cli::cmd_calibrate(cfg).code, cli::exit_precision_unreachable);

    cfg = reference_run_config();
    cfg.nu = 0.0;
    cfg.target_std = 0.5;
    EXPECT_EQ(cli::cmd_run(cfg).code, cli::exit_gain_unreachable);

    cfg = reference_run_config();
    cfg.input = (data_dir / "does_not_exist.csv").string();
    EXPECT_EQ(cli::cmd_stats(cfg).code, cli::exit_parse);

    RunConfig plan;
    plan.target_gain = 4.0;
    EXPECT_EQ(cli::cmd_plan(plan, 0.9).code, cli::exit_gain_unreachable);
}

TEST(Commands, BundleWriteIsByteIdentical) {
    const auto a = scratch("bundle_a");
    const auto b = scratch("bundle_b");
    ASSERT_EQ(cli::write_result(cli::cmd_run(reference_run_config()), a), cli::exit_ok);
    ASSERT_EQ(cli::write_result(cli::cmd_run(reference_run_config()), b), cli::exit_ok);
    std::vector<std::string> names;
    for (const auto& e : std::filesystem::directory_iterator(a))
        names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    EXPECT_FALSE(names.empty());
    for (const auto& n : names)
        EXPECT_EQ(io::read_file(a / n), io::read_file(b / n)) << n;
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(Commands, StatsAndFitAndSpectra) {
    const RunConfig cfg = reference_run_config();
    const auto stats = cli::cmd_stats(cfg);
    ASSERT_EQ(stats.code, cli::exit_ok);
    EXPECT_NE(stats.bundle.table("stats"), nullptr);
    const auto fit = cli::cmd_fit(cfg);
    ASSERT_EQ(fit.code, cli::exit_ok);
    EXPECT_NE(fit.bundle.table("degree_selection"), nullptr);
    const auto spectra = cli::cmd_spectra({});
    ASSERT_EQ(spectra.code, cli::exit_ok);
    EXPECT_EQ(spectra.bundle.plots.size(), 2u);
}
