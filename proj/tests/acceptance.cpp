// Acceptance runner: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hida/checks.hpp"
#include "hida/io.hpp"
#include "hida/random.hpp"

namespace fs = std::filesystem;
using hida::checks::SuiteReport;

namespace
{

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string seconds(double s)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Requires every tally in the report to pass; names the first failure.
void require_suite(Outcome &out, const SuiteReport &report)
{
    std::size_t checks = 0;
    for (const auto &t : report.tallies) {
        checks += t.passed + t.failed;
        if (t.failed > 0 && out.ok) {
            out.ok = false;
            out.detail += report.suite + "." + t.name + " failed " + std::to_string(t.failed) + " (" + t.first_failure + "); ";
        }
    }
    if (checks == 0) {
        out.ok = false;
        out.detail += report.suite + ": no checks ran; ";
    }
}

void require_time(Outcome &out, double s, double limit)
{
    out.detail += seconds(s) + " (limit " + seconds(limit) + ")";
    if (s >= limit) {
        out.ok = false;
    }
}

int run(const std::string &cmd)
{
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) {
        return -1;
    }
    return WEXITSTATUS(status);
}

Outcome ac1()
{
    Outcome out;
    hida::checks::AxiomOptions o;
    o.wick_trials = 500;
    o.poisson_trials = 0;
    o.star_trials = 0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = hida::checks::axioms_suite(o);
    const double s = elapsed(t0);
    require_suite(out, report);
    out.detail += "500 triples; ";
    require_time(out, s, 10.0);
    return out;
}

Outcome ac2()
{
    Outcome out;
    hida::checks::AxiomOptions o;
    o.wick_trials = 0;
    o.poisson_trials = 200;
    o.star_trials = 0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = hida::checks::axioms_suite(o);
    const double s = elapsed(t0);
    require_suite(out, report);
    out.detail += "200 triples; ";
    require_time(out, s, 30.0);
    return out;
}

Outcome ac3()
{
    Outcome out;
    hida::checks::AxiomOptions o;
    o.wick_trials = 0;
    o.poisson_trials = 0;
    o.star_trials = 100;
    o.order = 4;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = hida::checks::axioms_suite(o);
    const double s = elapsed(t0);
    require_suite(out, report);
    out.detail += "100 triples, order 4; ";
    require_time(out, s, 60.0);
    return out;
}

Outcome ac4()
{
    Outcome out;
    hida::checks::OracleOptions o;
    o.trials = 200;
    o.kmax = 2;
    o.max_degree = 3;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = hida::checks::oracle_suite(o);
    const double s = elapsed(t0);
    require_suite(out, report);
    out.detail += "200 cases; ";
    require_time(out, s, 60.0);
    return out;
}

Outcome ac5()
{
    Outcome out;
    hida::checks::GaugeOptions o;
    o.polynomial_trials = 100;
    o.exponential_trials = 20;
    o.order = 3;
    o.exact_degree = 4;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = hida::checks::gauge_suite(o);
    const double s = elapsed(t0);
    require_suite(out, report);
    const auto &cal = report.details.at("calibration");
    if (cal.at("status") != "unique") {
        out.ok = false;
        out.detail += "calibration status " + cal.at("status").get<std::string>() + "; ";
    }
    out.detail += "100 polynomial + 20 exponential pairs; ";
    require_time(out, s, 120.0);
    return out;
}

Outcome ac6()
{
    Outcome out;
    hida::checks::ExchangeOptions o;
    o.trials = 20;
    o.order = 3;
    o.exact_degree = 4;
    const auto t0 = std::chrono::steady_clock::now();
    const auto report = hida::checks::exchange_suite(o);
    require_suite(out, report);
    out.detail += "20 quadruples, degree 4, order 3; " + seconds(elapsed(t0));
    return out;
}

Outcome ac7()
{
    Outcome out;
    hida::checks::NormsOptions o;
    o.params = {4.0, 0.5, 1.0};
    o.kmax = 50;
    o.n = 2;
    o.max_degree = 8;
    require_suite(out, hida::checks::norms_suite(o));
    const auto rep = hida::nuclearity_sum(o.params, 50, 2, 8);
    const double rel = std::abs(rep.direct - rep.closed_form) / rep.closed_form;
    if (!rep.summable || !(rel <= 1e-6) || !std::isfinite(rep.total_bound)) {
        out.ok = false;
    }
    const auto zero = hida::nuclearity_sum({0.0, 1.0, 1.0}, 50, 2, 8);
    if (zero.summable) {
        out.ok = false;
        out.detail += "r = 0 not reported divergent; ";
    }
    std::ostringstream s;
    s << "direct " << rep.direct << ", closed form " << rep.closed_form << ", relative " << rel << ", total bound "
      << rep.total_bound << "; r = 0: " << (zero.summable ? "summable" : "divergent");
    out.detail += s.str();
    return out;
}

Outcome ac8()
{
    Outcome out;
    hida::checks::ProbeOptions o;
    o.config.seed = 42;
    o.config.samples = 500;
    o.golden = hida::io::read_json_file(HIDA_FIXTURE_DIR "/probe_bracket_golden.json");
    const auto report = hida::checks::probe_suite(o);
    require_suite(out, report);
    std::ostringstream s;
    s << "K_hat " << report.details.at("probe").at("K_hat").get<double>();
    out.detail += s.str();
    return out;
}

Outcome ac9()
{
    Outcome out;
    const hida::Space space = hida::Space::loop(2);
    hida::Sampler rng(2024);
    const auto f = hida::leading_weight_series(rng, space, 100, 6, 10000);
    const auto g = hida::leading_weight_series(rng, space, 100, 6, 10000);
    const unsigned threads = hida::thread_count();
    const auto t0 = std::chrono::steady_clock::now();
    const auto fg = hida::wick_product(f, g);
    const double s = elapsed(t0);
    const auto one = hida::wick_product_threads(f, g, 1);
    const auto four = hida::wick_product_threads(f, g, 4);
    if (!(fg == one) || !(four == one)) {
        out.ok = false;
        out.detail += "results differ across thread counts; ";
    }
    out.detail += std::to_string(f.size()) + " x " + std::to_string(g.size()) + " terms -> " + std::to_string(fg.size())
                  + ", " + std::to_string(threads) + " thread(s); identical for 1, 4, " + std::to_string(threads)
                  + " threads; ";
    require_time(out, s, 5.0);
    return out;
}

Outcome ac10()
{
    Outcome out;
    const std::string bin = HIDA_STAR_PATH;
    const std::string data = HIDA_DATA_DIR;
    const fs::path dir = fs::temp_directory_path() / ("hida-acceptance-" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string quiet = " 2>/dev/null";
    struct Case {
        std::string label;
        std::string cmd;
        int expected;
    };
    const std::vector<Case> cases{
        {"compute wick", bin + " compute wick --in " + data + "/a.json --in " + data + "/b.json --out " + (dir / "c.json").string(), 0},
        {"compute star", bin + " compute star --model " + data + "/loop.json --order 4 --convention paper < " + data
                             + "/pair.json > " + (dir / "star.json").string(), 0},
        {"malformed input", bin + " compute wick --in " + data + "/malformed.json --in " + data + "/b.json", 2},
        {"check axioms", bin + " check axioms --seed 42 --trials 100 --out " + (dir / "axioms.json").string(), 0},
        {"check oracle", bin + " check oracle --out " + (dir / "oracle.json").string(), 0},
        {"check gauge", bin + " check gauge --lambda " + data + "/lambda.json --order 3 --out " + (dir / "gauge.json").string(), 0},
        {"check norms", bin + " check norms --r 4 --C 0.5 --kmax 50 --out " + (dir / "norms.json").string(), 0},
        {"calibrate", bin + " calibrate --model " + data + "/cotangent.json --out " + (dir / "conventions.json").string(), 0},
        {"calibrate flipped", bin + " calibrate --model " + data + "/cotangent.json --flip-oracle --out "
                                  + (dir / "flipped.json").string(), 3},
    };
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto &c : cases) {
        const int rc = run(c.cmd + quiet);
        if (rc != c.expected) {
            out.ok = false;
            out.detail += c.label + " exit " + std::to_string(rc) + " (expected " + std::to_string(c.expected) + "); ";
        }
    }
    if (out.ok) {
        try {
            const auto star = hida::io::read_json_file((dir / "star.json").string());
            const auto report = hida::io::read_json_file((dir / "axioms.json").string());
            if (star.at("slots").size() != 5 || !report.contains("header") || !report.at("report").contains("assertions")) {
                out.ok = false;
                out.detail += "unexpected output layout; ";
            }
        } catch (const std::exception &e) {
            out.ok = false;
            out.detail += std::string("output unreadable: ") + e.what() + "; ";
        }
    }
    fs::remove_all(dir);
    out.detail += std::to_string(cases.size()) + " invocations; " + seconds(elapsed(t0));
    return out;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 wick algebra", ac1},          {"AC2 poisson axioms", ac2},       {"AC3 star axioms", ac3},
        {"AC4 oracle equivalence", ac4},    {"AC5 gauge equivalence", ac5},    {"AC6 exchange formula", ac6},
        {"AC7 nuclearity", ac7},            {"AC8 continuity probe", ac8},     {"AC9 wick performance", ac9},
        {"AC10 cli contract", ac10},
    };
    int failed = 0;
    for (const auto &[name, check] : criteria) {
        Outcome out;
        try {
            out = check();
        } catch (const std::exception &e) {
            out.ok = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::cout << (out.ok ? "PASS " : "FAIL ") << name << ": " << out.detail << std::endl;
        failed += out.ok ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
