/*
   Copyright 2026 The pbwtphi Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "pbwtphi/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "pbwtphi/decomposition.hpp"
#include "pbwtphi/errors.hpp"
#include "pbwtphi/harness.hpp"
#include "pbwtphi/phi_index.hpp"

namespace pbwtphi {

namespace {

using nlohmann::json;

struct CommandConfig {
    std::string input;
    std::string index;
    std::string variant = "v1";
    std::string direction = "pred";
    std::uint32_t d = 2;
    Site site = 0;
    Hap hap = 0;
    std::uint64_t k = 1;
    bool check = false;
    std::string format = "text";
    // verify
    std::uint64_t seed = 1;
    std::size_t panels = 200;
    std::size_t queries = 500;
    unsigned threads = 0;
    std::string reproducer = "pbwtphi-repro.json";
    std::string inject_fault = "none";
    // bench
    std::size_t bench_h = 100;
    std::size_t bench_m = 100000;
    std::size_t bench_sigma = 2;
    std::size_t bench_queries = 20000;
    std::size_t bench_repeats = 7;
    std::vector<std::uint64_t> bench_ks = {1, 4, 16, 64};
};

std::string join(const std::vector<Hap>& colors) {
    std::string s;
    for (std::size_t n = 0; n < colors.size(); ++n) {
        if (n) s.push_back(' ');
        s += std::to_string(colors[n]);
    }
    return s;
}

void emit(std::ostream& out, const CommandConfig& cfg, const json& doc,
          const std::vector<std::pair<std::string, std::string>>& lines) {
    if (cfg.format == "json") {
        out << doc.dump() << '\n';
        return;
    }
    for (const auto& [key, value] : lines) out << key << ' ' << value << '\n';
}

template <class T> std::string str(T v) { return std::to_string(v); }

int cmd_build(const CommandConfig& cfg, std::ostream& out) {
    const HaplotypePanel panel = read_panel_file(cfg.input);
    const Variant variant = parse_variant(cfg.variant);
    const Direction dir = parse_direction(cfg.direction);
    if (cfg.d != 2) throw ArgumentError("indexes are built with --d 2");
    const IntervalListSet intervals = haplotype_intervals(panel, dir);
    const RefinedSegmentTable rs = decompose(panel, intervals, 2);
    AnyPhiIndex idx;
    switch (variant) {
    case Variant::v1: idx = PhiIndexV1::build(panel, rs); break;
    case Variant::v2: idx = PhiIndexV2::build(panel, rs); break;
    case Variant::baseline: idx = BaselinePhiIndex::build(panel, intervals); break;
    }
    write_index_file(cfg.index, idx);
    const RunStats stats = run_stats(panel);
    const std::uint64_t bytes = serialized_size(idx);
    json doc = {{"h", panel.h()},
                {"m", panel.m()},
                {"r_tilde", stats.r_tilde},
                {"intervals", intervals.total()},
                {"alpha", rs.alpha()},
                {"canonical", rs.canonical_count()},
                {"variant", to_string(variant)},
                {"direction", std::string(to_string(dir))},
                {"bytes", bytes},
                {"output", cfg.index}};
    emit(out, cfg, doc,
         {{"h", str(panel.h())},
          {"m", str(panel.m())},
          {"r_tilde", str(stats.r_tilde)},
          {"intervals", str(intervals.total())},
          {"alpha", str(rs.alpha())},
          {"canonical", str(rs.canonical_count())},
          {"variant", to_string(variant)},
          {"direction", std::string(to_string(dir))},
          {"bytes", str(bytes)},
          {"output", cfg.index}});
    return kExitOk;
}

int cmd_query(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
    const AnyPhiIndex idx = read_index_file(cfg.index);
    const std::vector<Hap> colors = query(idx, cfg.site, cfg.hap, cfg.k);
    std::optional<bool> check;
    if (cfg.check) {
        const HaplotypePanel panel = read_panel_file(cfg.input);
        const auto [h, m, dir] = std::visit([](const auto& x) { return std::tuple(x.h(), x.m(), x.direction()); }, idx);
        if (panel.h() != h || panel.m() != m) throw ConsistencyError("panel shape does not match the index");
        if (static_cast<double>(h) * static_cast<double>(m) > 1e7)
            err << "warning: building the reference column table for " << h << " x " << m << " cells\n";
        check = oracle_phi_iter(OracleIndex(panel), cfg.site, cfg.hap, cfg.k, dir) == colors;
    }
    if (cfg.format == "json") {
        json doc = {{"site", cfg.site}, {"hap", cfg.hap}, {"k", cfg.k}, {"colors", colors}};
        if (check) doc["check"] = *check ? "pass" : "fail";
        out << doc.dump() << '\n';
    } else {
        if (!colors.empty()) out << join(colors) << '\n';
        if (check) err << "check " << (*check ? "PASS" : "FAIL") << '\n';
    }
    return check && !*check ? kExitVerify : kExitOk;
}

int cmd_stats(const CommandConfig& cfg, std::ostream& out) {
    const HaplotypePanel panel = read_panel_file(cfg.input);
    const Direction dir = parse_direction(cfg.direction);
    const RunStats stats = run_stats(panel);
    const IntervalListSet intervals = haplotype_intervals(panel, dir);
    const RefinedSegmentTable rs = decompose(panel, intervals, cfg.d);
    const std::uint64_t h = panel.h();
    const std::uint64_t total = intervals.total();
    const std::uint64_t alpha = rs.alpha();
    const std::uint64_t canonical = rs.canonical_count();
    const std::uint64_t alpha_bound = (stats.r_tilde + h) * (1 + ceil_div(1, cfg.d - 1));
    const std::uint64_t canonical_bound = ceil_div(total, cfg.d - 1);
    const bool intervals_ok = stats.r_tilde <= total && total <= stats.r_tilde + h;
    const bool alpha_ok = alpha <= alpha_bound;
    const bool canonical_ok = canonical <= canonical_bound && canonical == alpha - total;
    auto verdict = [](bool ok) { return std::string(ok ? "PASS" : "FAIL"); };

    json doc = {{"h", h},
                {"m", panel.m()},
                {"d", cfg.d},
                {"direction", std::string(to_string(dir))},
                {"r_tilde", stats.r_tilde},
                {"intervals", total},
                {"alpha", alpha},
                {"canonical", canonical},
                {"checks",
                 {{"intervals_in_range", {{"pass", intervals_ok}, {"low", stats.r_tilde}, {"high", stats.r_tilde + h}}},
                  {"alpha_bound", {{"pass", alpha_ok}, {"bound", alpha_bound}}},
                  {"canonical_bound", {{"pass", canonical_ok}, {"bound", canonical_bound}}}}}};
    emit(out, cfg, doc,
         {{"h", str(h)},
          {"m", str(panel.m())},
          {"d", str(cfg.d)},
          {"direction", std::string(to_string(dir))},
          {"r_tilde", str(stats.r_tilde)},
          {"intervals", str(total)},
          {"alpha", str(alpha)},
          {"canonical", str(canonical)},
          {"check", "intervals_in_range " + verdict(intervals_ok) + " " + str(stats.r_tilde) + " <= " + str(total) +
                        " <= " + str(stats.r_tilde + h)},
          {"check", "alpha_bound " + verdict(alpha_ok) + " " + str(alpha) + " <= " + str(alpha_bound)},
          {"check", "canonical_bound " + verdict(canonical_ok) + " " + str(canonical) + " <= " + str(canonical_bound) +
                        ", alpha - intervals = " + str(alpha - total)}});
    return intervals_ok && alpha_ok && canonical_ok ? kExitOk : kExitVerify;
}

json failure_json(const Failure& f) {
    json doc = {{"kind", to_string(f.kind)},
                {"trial", f.trial},
                {"panel_seed", f.panel_seed},
                {"direction", std::string(to_string(f.direction))},
                {"h", f.panel.h()},
                {"m", f.panel.m()},
                {"panel", render_panel(f.panel)},
                {"message", f.message}};
    if (f.kind == FailureKind::query && f.variant) {
        doc["variant"] = to_string(*f.variant);
        doc["site"] = f.j;
        doc["hap"] = f.i;
        doc["k"] = f.k;
        doc["expected"] = f.expected;
        doc["got"] = f.got;
    }
    if (f.kind == FailureKind::decomposition) doc["d"] = f.d;
    return doc;
}

int cmd_verify(const CommandConfig& cfg, std::ostream& out, std::ostream& err) {
    CampaignConfig campaign;
    campaign.seed = cfg.seed;
    campaign.panels = cfg.panels;
    campaign.queries = cfg.queries;
    campaign.threads = cfg.threads;
    campaign.stop_at_first_failure = true;
    if (cfg.inject_fault == "v1-iota") campaign.fault = Fault::v1_iota;
    else if (cfg.inject_fault == "v2-rho") campaign.fault = Fault::v2_rho;
    else if (cfg.inject_fault == "split-threshold") campaign.split_threshold_mutation = true;
    else if (cfg.inject_fault != "none") throw ArgumentError("unknown fault '" + cfg.inject_fault + "'");

    const CampaignReport report = run_campaign(campaign);
    json doc = {{"seed", cfg.seed},
                {"panels", cfg.panels},
                {"queries_per_direction", cfg.queries},
                {"threads", report.threads},
                {"queries_checked", report.queries_checked()},
                {"tables_checked", report.tables_checked()},
                {"seconds", report.seconds},
                {"verdict", report.ok() ? "pass" : "fail"}};
    std::vector<std::pair<std::string, std::string>> lines = {
        {"seed", str(cfg.seed)},
        {"panels", str(cfg.panels)},
        {"queries_checked", str(report.queries_checked())},
        {"tables_checked", str(report.tables_checked())},
        {"threads", str(report.threads)},
        {"verdict", report.ok() ? "PASS" : "FAIL"}};
    if (const Failure* f = report.first_failure()) {
        const Failure small = minimize(*f, campaign);
        const json repro = failure_json(small);
        std::ofstream file(cfg.reproducer);
        if (!file) throw IoError("cannot write reproducer: " + cfg.reproducer);
        file << repro.dump(2) << '\n';
        doc["failure"] = repro;
        doc["reproducer"] = cfg.reproducer;
        lines.emplace_back("failure", to_string(small.kind) + " in trial " + str(small.trial) + ": " + small.message);
        lines.emplace_back("reproducer", cfg.reproducer);
        err << "verification failed; minimized reproducer written to " << cfg.reproducer << '\n';
    }
    emit(out, cfg, doc, lines);
    return report.ok() ? kExitOk : kExitVerify;
}

int cmd_bench(const CommandConfig& cfg, std::ostream& out) {
    BenchConfig bench;
    bench.h = cfg.bench_h;
    bench.m = cfg.bench_m;
    bench.sigma = cfg.bench_sigma;
    bench.seed = cfg.seed;
    bench.queries = cfg.bench_queries;
    bench.repeats = cfg.bench_repeats;
    bench.ks = cfg.bench_ks;
    const BenchReport report = run_bench(bench);
    if (cfg.format == "json") {
        json rows = json::array();
        for (const auto& r : report.rows)
            rows.push_back({{"variant", to_string(r.variant)},
                            {"k", r.k},
                            {"steps", r.steps},
                            {"median_ns", r.median_ns},
                            {"ns_per_step", r.ns_per_step}});
        json doc = {{"h", bench.h},
                    {"m", bench.m},
                    {"sigma", bench.sigma},
                    {"seed", bench.seed},
                    {"r_tilde", report.r_tilde},
                    {"intervals", report.intervals},
                    {"alpha", report.alpha},
                    {"bytes", {{"v1", report.bytes_v1}, {"v2", report.bytes_v2}, {"baseline", report.bytes_baseline}}},
                    {"build_seconds", report.build_seconds},
                    {"rows", rows}};
        out << doc.dump() << '\n';
        return kExitOk;
    }
    out << "h " << bench.h << "\nm " << bench.m << "\nr_tilde " << report.r_tilde << "\nintervals "
        << report.intervals << "\nalpha " << report.alpha << "\nbytes v1 " << report.bytes_v1 << "\nbytes v2 "
        << report.bytes_v2 << "\nbytes baseline " << report.bytes_baseline << '\n';
    out << "variant k steps median_ns ns_per_step\n";
    for (const auto& r : report.rows)
        out << to_string(r.variant) << ' ' << r.k << ' ' << r.steps << ' ' << static_cast<std::uint64_t>(r.median_ns)
            << ' ' << r.ns_per_step << '\n';
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CommandConfig cfg;
    CLI::App app{"PBWT phi-query indexes: build, query, inspect and verify."};
    app.require_subcommand(1);
    auto formats = CLI::IsMember({"text", "json"});
    auto directions = CLI::IsMember({"pred", "succ"});

    auto* build = app.add_subcommand("build", "Build an index file from a panel");
    build->add_option("--input,-i", cfg.input, "Panel file")->required();
    build->add_option("--output,-o", cfg.index, "Index file to write")->required();
    build->add_option("--variant", cfg.variant, "v1, v2 or baseline")->check(CLI::IsMember({"v1", "v2", "baseline"}));
    build->add_option("--direction", cfg.direction, "pred (phi) or succ (phi inverse)")->check(directions);
    build->add_option("--d", cfg.d, "Split parameter; indexes require 2");
    build->add_option("--format", cfg.format)->check(formats);

    auto* query_cmd = app.add_subcommand("query", "Iterated phi query; sites and haplotypes are 1-based");
    query_cmd->add_option("--index", cfg.index, "Index file")->required();
    query_cmd->add_option("--site,-j", cfg.site, "Site j")->required();
    query_cmd->add_option("--hap,-c", cfg.hap, "Haplotype i")->required();
    query_cmd->add_option("--k", cfg.k, "Number of steps");
    auto* input_opt = query_cmd->add_option("--input,-i", cfg.input, "Panel file for --check");
    query_cmd->add_flag("--check", cfg.check, "Compare against a direct scan of the panel")->needs(input_opt);
    query_cmd->add_option("--format", cfg.format)->check(formats);

    auto* stats = app.add_subcommand("stats", "Interval and segment counts with bound checks");
    stats->add_option("--input,-i", cfg.input, "Panel file")->required();
    stats->add_option("--d", cfg.d, "Split parameter (>= 2)")->check(CLI::Range(2u, 1000000u));
    stats->add_option("--direction", cfg.direction)->check(directions);
    stats->add_option("--format", cfg.format)->check(formats);

    auto* verify = app.add_subcommand("verify", "Differential check of all indexes on random panels");
    verify->add_option("--seed", cfg.seed);
    verify->add_option("--panels,-n", cfg.panels)->check(CLI::PositiveNumber);
    verify->add_option("--queries,-q", cfg.queries);
    verify->add_option("--threads", cfg.threads, "Worker threads (0 = auto, capped by PBWTPHI_THREADS)");
    verify->add_option("--reproducer", cfg.reproducer, "Where to write a failing case");
    verify->add_option("--inject-fault", cfg.inject_fault)
        ->check(CLI::IsMember({"none", "v1-iota", "v2-rho", "split-threshold"}))
        ->group("");
    verify->add_option("--format", cfg.format)->check(formats);

    auto* bench = app.add_subcommand("bench", "Per-step query latency and index sizes");
    bench->set_help_flag("--help", "Print this help message and exit"); // frees -h for --h
    bench->add_option("--h", cfg.bench_h)->check(CLI::PositiveNumber);
    bench->add_option("--m", cfg.bench_m)->check(CLI::PositiveNumber);
    bench->add_option("--sigma", cfg.bench_sigma)->check(CLI::Range(2, 64));
    bench->add_option("--seed", cfg.seed);
    bench->add_option("--queries", cfg.bench_queries)->check(CLI::PositiveNumber);
    bench->add_option("--repeats", cfg.bench_repeats)->check(CLI::PositiveNumber);
    bench->add_option("--k", cfg.bench_ks, "Step counts to time")->delimiter(',');
    bench->add_option("--format", cfg.format)->check(formats);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*build) return cmd_build(cfg, out);
        if (*query_cmd) return cmd_query(cfg, out, err);
        if (*stats) return cmd_stats(cfg, out);
        if (*verify) return cmd_verify(cfg, out, err);
        if (*bench) return cmd_bench(cfg, out);
    } catch (const ArgumentError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const RangeError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitUsage;
}

} // namespace pbwtphi
