// hida-star: command-line front end.
//
// Exit codes: 0 success, 1 internal error, 2 invalid input, 3 suite failure.

#include <chrono>
#include <ctime>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hida/calibration.hpp"
#include "hida/checks.hpp"
#include "hida/io.hpp"
#include "hida/star.hpp"

namespace
{

using hida::io::InputError;
using hida::io::Json;

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_input = 2;
constexpr int exit_suite = 3;

struct RunConfig {
    std::string command;
    std::string target;
    std::vector<std::string> inputs;
    std::string out;
    std::string model;
    std::string lambda;
    std::optional<unsigned> order;
    std::optional<int> degree;
    std::string convention;
    std::string mode = "exact";
    std::uint64_t seed = 42;
    std::optional<std::size_t> trials;
    std::optional<double> r, C, C1;
    std::optional<double> to_r, to_C, to_C1;
    std::optional<double> source_r, source_C, source_C1;
    std::optional<int> kmax;
    int n = 2;
    std::string op = "bracket";
    unsigned l = 1;
    std::string golden;
    std::string format = "json";
    bool flip_oracle = false;
};

std::string timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// Report documents isolate the run timestamp in a header.
Json with_header(const RunConfig &cfg, Json body)
{
    Json doc;
    doc["header"] = {{"tool", "hida-star"}, {"command", cfg.command + " " + cfg.target}, {"generated", timestamp()}};
    doc["report"] = std::move(body);
    return doc;
}

void emit(const RunConfig &cfg, const std::string &text)
{
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        hida::io::write_text_file(cfg.out, text);
    }
}

void emit(const RunConfig &cfg, const Json &doc)
{
    emit(cfg, hida::io::dump(doc));
}

// Series documents from --in, or from standard input (one document or a
// list of documents) when no --in is given.
std::vector<Json> input_documents(const RunConfig &cfg)
{
    std::vector<Json> docs;
    if (!cfg.inputs.empty()) {
        for (const auto &path : cfg.inputs) {
            docs.push_back(hida::io::read_json_file(path));
        }
        return docs;
    }
    std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw InputError(std::string("standard input: ") + e.what());
    }
    if (doc.is_array()) {
        for (auto &d : doc) {
            docs.push_back(std::move(d));
        }
    } else {
        docs.push_back(std::move(doc));
    }
    return docs;
}

void require_inputs(const std::vector<Json> &docs, std::size_t count, const std::string &what)
{
    if (docs.size() != count) {
        throw InputError("--in: " + what + " takes " + std::to_string(count) + " input series, got "
                         + std::to_string(docs.size()));
    }
}

hida::SymplecticModel model_of(const RunConfig &cfg, hida::ModelKind fallback)
{
    if (!cfg.model.empty()) {
        return hida::io::model_from_json(hida::io::read_json_file(cfg.model));
    }
    if (fallback == hida::ModelKind::loop) {
        return hida::LoopModel{};
    }
    return hida::CotangentModel{hida::DiagonalOperator::from_formula(hida::Rational(1), 1, {hida::Rational(1), 1.0}),
                                1};
}

std::optional<hida::DiagonalOperator> eigenvalues_of(const RunConfig &cfg)
{
    if (!cfg.lambda.empty()) {
        return hida::io::diagonal_from_json(hida::io::read_json_file(cfg.lambda));
    }
    if (!cfg.model.empty()) {
        const auto model = model_of(cfg, hida::ModelKind::cotangent);
        if (const auto *cot = std::get_if<hida::CotangentModel>(&model)) {
            return cot->A;
        }
        throw InputError("--model: this command needs a cotangent model");
    }
    return std::nullopt;
}

hida::DiagonalOperator eigenvalues_or_default(const RunConfig &cfg)
{
    if (auto A = eigenvalues_of(cfg)) {
        return *A;
    }
    return std::get<hida::CotangentModel>(model_of(cfg, hida::ModelKind::cotangent)).A;
}

hida::StarConvention star_convention(const RunConfig &cfg)
{
    if (cfg.convention.empty() || cfg.convention == "paper") {
        return hida::StarConvention::paper();
    }
    if (cfg.convention == "bracket-normalized") {
        return hida::StarConvention::bracket_normalized();
    }
    if (cfg.convention.rfind("file:", 0) == 0) {
        const auto doc = hida::io::read_json_file(cfg.convention.substr(5));
        const Json &c = doc.contains("convention") ? doc.at("convention") : doc;
        if (!c.is_object() || !c.contains("prefactor") || !c.at("prefactor").is_string()) {
            throw InputError("--convention: file needs a string field \"prefactor\"");
        }
        try {
            return hida::StarConvention{hida::parse_rational(c.at("prefactor").get<std::string>())};
        } catch (const std::invalid_argument &e) {
            throw InputError(std::string("--convention: ") + e.what());
        }
    }
    throw InputError("--convention: expected paper, bracket-normalized or file:<path>, got \"" + cfg.convention + "\"");
}

// Cotangent commands: a convention file, or the calibrated tuple.
hida::CotangentConvention cotangent_convention(const RunConfig &cfg, const hida::DiagonalOperator &A)
{
    if (cfg.convention.rfind("file:", 0) == 0) {
        return hida::io::cotangent_convention_from_json(hida::io::read_json_file(cfg.convention.substr(5)));
    }
    if (!cfg.convention.empty()) {
        throw InputError("--convention: the cotangent model takes file:<path> or the calibrated default, got \""
                         + cfg.convention + "\"");
    }
    const auto conv = hida::checks::calibrated_convention(hida::calibrate(A));
    if (!conv) {
        throw std::runtime_error("calibration found no convention tuple for these eigenvalues");
    }
    return *conv;
}

template <typename T>
int compute_typed(const RunConfig &cfg)
{
    using Series = hida::FockSeries<T>;
    const auto docs = input_documents(cfg);
    std::vector<Series> in;
    for (const auto &d : docs) {
        in.push_back(hida::io::series_from_json<T>(d));
    }
    const unsigned order = cfg.order.value_or(4);
    const std::string &what = cfg.target;

    if (what == "wick") {
        require_inputs(docs, 2, what);
        emit(cfg, hida::io::series_to_json(hida::wick_product(in[0], in[1])));
        return exit_ok;
    }
    if (what == "wickexp") {
        require_inputs(docs, 1, what);
        if (!cfg.degree) {
            throw InputError("--degree: compute wickexp needs a degree cap");
        }
        if (!in[0].is_homogeneous(1)) {
            throw InputError("--in: the Wick exponential needs a series of pure degree 1");
        }
        emit(cfg, hida::io::series_to_json(hida::wick_exponential(in[0], *cfg.degree)));
        return exit_ok;
    }
    if (what == "bracket") {
        require_inputs(docs, 2, what);
        auto model = model_of(cfg, in[0].space().kind);
        if (auto *cot = std::get_if<hida::CotangentModel>(&model)) {
            cot->bracket_sign = cotangent_convention(cfg, cot->A).bracket_sign;
        }
        emit(cfg, hida::io::series_to_json(hida::poisson_bracket(in[0], in[1], model)));
        return exit_ok;
    }
    if (what == "star") {
        require_inputs(docs, 2, what);
        const auto model = model_of(cfg, hida::ModelKind::loop);
        const auto *loop = std::get_if<hida::LoopModel>(&model);
        if (loop == nullptr) {
            throw InputError("--model: compute star needs a loop model (use star-a on the cotangent model)");
        }
        const auto conv = star_convention(cfg);
        const auto result = hida::star(in[0], in[1], order, *loop, conv);
        emit(cfg, hida::io::deformation_to_json(result, hida::convention_fields(conv, loop->sigma)));
        return exit_ok;
    }
    if (what == "star-a" || what == "tprime") {
        const auto A = eigenvalues_or_default(cfg);
        const auto conv = cotangent_convention(cfg, A);
        if (what == "star-a") {
            require_inputs(docs, 2, what);
            const auto result = hida::star_a(in[0], in[1], order, A, conv);
            emit(cfg, hida::io::deformation_to_json(result, hida::convention_fields(conv)));
        } else {
            require_inputs(docs, 1, what);
            const auto result = hida::t_prime(in[0], A, order, conv.t1_sign);
            emit(cfg, hida::io::deformation_to_json(result, hida::convention_fields(conv)));
        }
        return exit_ok;
    }
    throw InputError("compute: unknown operation \"" + what + "\"");
}

int compute(const RunConfig &cfg)
{
    if (cfg.format != "json") {
        throw InputError("--format: compute writes JSON only");
    }
    const auto mode = hida::parse_scalar_mode(cfg.mode);
    return mode == hida::ScalarMode::exact ? compute_typed<hida::ExactComplex>(cfg)
                                           : compute_typed<hida::FloatComplex>(cfg);
}

hida::NormParams params(std::optional<double> r, std::optional<double> C, std::optional<double> C1,
                        const hida::NormParams &fallback, const char *flag)
{
    hida::NormParams p{r.value_or(fallback.r), C.value_or(fallback.C), C1.value_or(fallback.C1)};
    try {
        p.validate();
    } catch (const std::invalid_argument &e) {
        throw InputError(std::string(flag) + ": " + e.what());
    }
    return p;
}

int finish_check(const RunConfig &cfg, const hida::checks::SuiteReport &report, const std::string &csv = {})
{
    if (cfg.format == "csv") {
        emit(cfg, csv);
    } else {
        emit(cfg, with_header(cfg, hida::checks::to_json(report)));
    }
    for (const auto &t : report.tallies) {
        std::cerr << (t.failed == 0 ? "PASS " : "FAIL ") << t.name << " " << t.passed << "/" << (t.passed + t.failed);
        if (t.failed > 0) {
            std::cerr << " first failure: " << t.first_failure;
        }
        std::cerr << "\n";
    }
    return report.passed() ? exit_ok : exit_suite;
}

int check(const RunConfig &cfg)
{
    const std::string &suite = cfg.target;
    if (cfg.format == "csv" && suite != "norms" && suite != "probe") {
        throw InputError("--format: csv is available for check norms and check probe only");
    }
    if (cfg.format != "csv" && cfg.format != "json") {
        throw InputError("--format: expected json or csv, got \"" + cfg.format + "\"");
    }
    if (suite == "axioms") {
        hida::checks::AxiomOptions o;
        o.seed = cfg.seed;
        if (cfg.trials) {
            o.wick_trials = o.poisson_trials = o.star_trials = *cfg.trials;
        }
        o.order = cfg.order.value_or(4);
        if (!cfg.model.empty()) {
            const auto model = model_of(cfg, hida::ModelKind::loop);
            const auto *loop = std::get_if<hida::LoopModel>(&model);
            if (loop == nullptr) {
                throw InputError("--model: check axioms takes a loop model");
            }
            o.loop = *loop;
        }
        return finish_check(cfg, hida::checks::axioms_suite(o));
    }
    if (suite == "oracle") {
        hida::checks::OracleOptions o;
        o.seed = cfg.seed;
        o.trials = cfg.trials.value_or(o.trials);
        if (cfg.kmax) {
            o.kmax = *cfg.kmax;
        }
        if (cfg.degree) {
            o.max_degree = *cfg.degree;
        }
        if (o.kmax < 1 || o.kmax > 3 || o.max_degree < 0 || o.max_degree > 3) {
            throw InputError("--kmax/--degree: the dense oracle is limited to kmax <= 3 and degree <= 3");
        }
        return finish_check(cfg, hida::checks::oracle_suite(o));
    }
    if (suite == "gauge" || suite == "exchange") {
        const auto A = eigenvalues_of(cfg);
        std::optional<hida::CotangentConvention> conv;
        if (!cfg.convention.empty()) {
            if (cfg.convention.rfind("file:", 0) != 0) {
                throw InputError("--convention: check " + suite + " takes file:<path> or the calibrated default");
            }
            conv = hida::io::cotangent_convention_from_json(hida::io::read_json_file(cfg.convention.substr(5)));
        }
        if (suite == "gauge") {
            hida::checks::GaugeOptions o;
            o.seed = cfg.seed;
            if (cfg.trials) {
                o.polynomial_trials = *cfg.trials;
                o.exponential_trials = std::min<std::size_t>(*cfg.trials, 20);
            }
            o.order = cfg.order.value_or(3);
            o.exact_degree = cfg.degree.value_or(4);
            o.A = A;
            o.convention = conv;
            return finish_check(cfg, hida::checks::gauge_suite(o));
        }
        hida::checks::ExchangeOptions o;
        o.seed = cfg.seed;
        o.trials = cfg.trials.value_or(o.trials);
        o.order = cfg.order.value_or(3);
        o.exact_degree = cfg.degree.value_or(4);
        o.A = A;
        o.convention = conv;
        return finish_check(cfg, hida::checks::exchange_suite(o));
    }
    if (suite == "norms") {
        hida::checks::NormsOptions o;
        o.seed = cfg.seed;
        o.trials = cfg.trials.value_or(o.trials);
        o.params = params(cfg.r, cfg.C, cfg.C1, o.params, "--r/--C/--C1");
        o.kmax = cfg.kmax.value_or(o.kmax);
        o.n = cfg.n;
        o.max_degree = cfg.degree.value_or(o.max_degree);
        if (o.kmax < 0 || o.max_degree < 0 || o.n < 1) {
            throw InputError("--kmax/--degree/--n: must be nonnegative (n positive)");
        }
        if (cfg.to_r || cfg.to_C || cfg.to_C1) {
            o.embedding_to = params(cfg.to_r, cfg.to_C, cfg.to_C1, o.params, "--to-r/--to-C/--to-C1");
        }
        const auto report = hida::checks::norms_suite(o);
        std::string csv;
        if (cfg.format == "csv") {
            const auto nuc = hida::nuclearity_sum(o.params, o.kmax, o.n, o.max_degree);
            csv = hida::io::mode_sum_to_csv(nuc, "nuclearity");
            if (o.embedding_to) {
                const auto hs = hida::hs_embedding_norm(o.params, *o.embedding_to, o.kmax, o.n, o.max_degree);
                const auto rows = hida::io::mode_sum_to_csv(hs, "hs_embedding");
                csv += rows.substr(rows.find('\n') + 1);
            }
        }
        return finish_check(cfg, report, csv);
    }
    if (suite == "probe") {
        hida::checks::ProbeOptions o;
        auto &c = o.config;
        c.seed = cfg.seed;
        c.samples = cfg.trials.value_or(c.samples);
        try {
            c.op = hida::parse_probe_op(cfg.op);
        } catch (const std::invalid_argument &e) {
            throw InputError(std::string("--op: ") + e.what());
        }
        c.l = cfg.l;
        c.target = params(cfg.r, cfg.C, cfg.C1, c.target, "--r/--C/--C1");
        c.source = params(cfg.source_r, cfg.source_C, cfg.source_C1, c.source, "--source-r/--source-C/--source-C1");
        if (cfg.degree) {
            c.max_degree = *cfg.degree;
        }
        if (cfg.kmax) {
            c.kmax = *cfg.kmax;
        }
        if (c.op == hida::ProbeOp::e_a_form) {
            c.A = eigenvalues_or_default(cfg);
        } else if (!cfg.model.empty()) {
            const auto model = model_of(cfg, hida::ModelKind::loop);
            if (const auto *loop = std::get_if<hida::LoopModel>(&model)) {
                c.loop = *loop;
            } else {
                throw InputError("--model: the bracket and p_l probes take a loop model");
            }
        }
        if (c.op == hida::ProbeOp::p_l) {
            c.convention = star_convention(cfg);
        }
        if (!cfg.golden.empty()) {
            const auto doc = hida::io::read_json_file(cfg.golden);
            o.golden = doc.contains("report") ? doc.at("report").at("details").at("probe") : doc;
        }
        const auto report = hida::checks::probe_suite(o);
        std::string csv;
        if (cfg.format == "csv") {
            csv = hida::io::probe_to_csv(hida::continuity_probe(c));
        }
        return finish_check(cfg, report, csv);
    }
    throw InputError("check: unknown suite \"" + suite + "\"");
}

int calibrate(const RunConfig &cfg)
{
    const auto A = eigenvalues_or_default(cfg);
    hida::CalibrationOptions options;
    options.flip_reference_bracket = cfg.flip_oracle;
    const auto result = hida::calibrate(A, options);
    RunConfig out = cfg;
    if (out.out.empty()) {
        out.out = "conventions.json";
    }
    hida::io::write_json_file(out.out, hida::io::calibration_to_json(result));
    std::cerr << "calibration " << hida::to_string(result.status);
    for (const auto &c : result.candidates) {
        if (c.passed) {
            std::cerr << "\n  passing: prefactor " << hida::format_rational(c.convention.prefactor) << ", bracket_sign "
                      << c.convention.bracket_sign << ", t1_sign " << c.convention.t1_sign << ", exchange_shift "
                      << c.convention.exchange_shift;
        }
    }
    std::cerr << "\n";
    return result.status == hida::CalibrationStatus::unique ? exit_ok : exit_suite;
}

int dispatch(const RunConfig &cfg)
{
    if (cfg.command == "compute") {
        return compute(cfg);
    }
    if (cfg.command == "check") {
        return check(cfg);
    }
    return calibrate(cfg);
}

void add_common(CLI::App *cmd, RunConfig &cfg)
{
    cmd->add_option("--out", cfg.out, "Output path (default: standard output)");
    cmd->add_option("--model", cfg.model, "Model document (loop or cotangent)");
    cmd->add_option("--lambda", cfg.lambda, "Eigenvalue document for the cotangent operator A");
    cmd->add_option("--order", cfg.order, "Order L in h");
    cmd->add_option("--degree", cfg.degree, "Degree cap D");
    cmd->add_option("--convention", cfg.convention, "paper | bracket-normalized | file:<path>");
    cmd->add_option("--mode", cfg.mode, "Scalar mode")->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--seed", cfg.seed, "Random seed");
    cmd->add_option("--trials", cfg.trials, "Number of random trials (probe: samples)");
    cmd->add_option("--r", cfg.r, "Weight exponent r");
    cmd->add_option("--C", cfg.C, "Norm constant C");
    cmd->add_option("--C1", cfg.C1, "Weight constant C1");
    cmd->add_option("--kmax", cfg.kmax, "Mode cutoff");
    cmd->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
}

} // namespace

int main(int argc, char **argv)
{
    RunConfig cfg;
    CLI::App app{"Sparse Wick, star and *_h^A products on Fock series; identity suites and norm reports"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "hida-star 1.0");

    auto *compute_cmd = app.add_subcommand("compute", "Compute a product or transform");
    compute_cmd->add_option("operation", cfg.target, "wick | bracket | star | star-a | tprime | wickexp")
        ->required()
        ->check(CLI::IsMember({"wick", "bracket", "star", "star-a", "tprime", "wickexp"}));
    compute_cmd->add_option("--in", cfg.inputs, "Input series document (repeatable; default: standard input)");
    add_common(compute_cmd, cfg);

    auto *check_cmd = app.add_subcommand("check", "Run an identity or norm suite");
    check_cmd->add_option("suite", cfg.target, "axioms | oracle | gauge | exchange | norms | probe")
        ->required()
        ->check(CLI::IsMember({"axioms", "oracle", "gauge", "exchange", "norms", "probe"}));
    add_common(check_cmd, cfg);
    check_cmd->add_option("--n", cfg.n, "Loop dimension for norm sums");
    check_cmd->add_option("--to-r", cfg.to_r, "Hilbert-Schmidt embedding target r");
    check_cmd->add_option("--to-C", cfg.to_C, "Hilbert-Schmidt embedding target C");
    check_cmd->add_option("--to-C1", cfg.to_C1, "Hilbert-Schmidt embedding target C1");
    check_cmd->add_option("--source-r", cfg.source_r, "Probe source r");
    check_cmd->add_option("--source-C", cfg.source_C, "Probe source C");
    check_cmd->add_option("--source-C1", cfg.source_C1, "Probe source C1");
    check_cmd->add_option("--op", cfg.op, "Probe operation: bracket | p_l | e_a_form");
    check_cmd->add_option("--l", cfg.l, "Probe order l for p_l");
    check_cmd->add_option("--golden", cfg.golden, "Golden probe report to compare against");

    auto *calibrate_cmd = app.add_subcommand("calibrate", "Fix the cotangent convention tuple");
    add_common(calibrate_cmd, cfg);
    calibrate_cmd->add_flag("--flip-oracle", cfg.flip_oracle, "Test fixture: sign-flipped reference product")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return exit_input;
    }
    for (auto *sub : {compute_cmd, check_cmd, calibrate_cmd}) {
        if (sub->parsed()) {
            cfg.command = sub->get_name();
        }
    }

    try {
        return dispatch(cfg);
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::domain_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
