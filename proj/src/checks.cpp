#include "hida/checks.hpp"

#include <cmath>
#include <functional>
#include <memory>

#include "hida/oracle.hpp"
#include "hida/random.hpp"

namespace hida::checks
{

void Tally::record(bool ok, const std::string &what)
{
    if (ok) {
        ++passed;
        return;
    }
    if (failed == 0) {
        first_failure = what;
    }
    ++failed;
}

bool SuiteReport::passed() const
{
    for (const auto &t : tallies) {
        if (t.failed > 0) {
            return false;
        }
    }
    return !tallies.empty();
}

Tally &SuiteReport::tally(const std::string &name)
{
    for (auto &t : tallies) {
        if (t.name == name) {
            return t;
        }
    }
    tallies.push_back({name});
    return tallies.back();
}

io::Json to_json(const SuiteReport &report)
{
    io::Json assertions = io::Json::array();
    for (const auto &t : report.tallies) {
        io::Json a{{"name", t.name}, {"passed", t.passed}, {"failed", t.failed}};
        if (t.failed > 0) {
            a["first_failure"] = t.first_failure;
        }
        assertions.push_back(std::move(a));
    }
    io::Json doc;
    doc["suite"] = report.suite;
    doc["passed"] = report.passed();
    doc["seed"] = report.seed;
    doc["convention"] = report.convention.empty() ? io::Json(nullptr) : io::convention_to_json(report.convention);
    doc["assertions"] = std::move(assertions);
    doc["details"] = report.details;
    return doc;
}

namespace
{

std::string trial(std::size_t n)
{
    return "trial " + std::to_string(n);
}

ExactSeries draw(Sampler &rng, const Space &space, int kmax, int min_degree, int max_degree, int max_terms)
{
    RandomSeriesSpec spec;
    spec.space = space;
    spec.kmax = kmax;
    spec.min_degree = min_degree;
    spec.max_degree = max_degree;
    spec.max_terms = max_terms;
    spec.complex = rng.uniform(0, 3) == 0;
    return random_exact_series(rng, spec);
}

ExactSeries one(const Space &space)
{
    return ExactSeries::constant(space, ExactComplex(1));
}

// Degree-one side-1 series on one or two modes.
ExactSeries direction(Sampler &rng, int kmax, int modes)
{
    std::vector<std::pair<MultiIndex, ExactComplex>> raw;
    for (int j = 0; j < modes; ++j) {
        int k = static_cast<int>(rng.uniform(1, kmax));
        if (rng.uniform(0, 1) == 0) {
            k = -k;
        }
        Rational c = rng.rational(3);
        if (sgn(c) == 0) {
            c = 1;
        }
        raw.emplace_back(MultiIndex{BasisIndex{k, 1}}, ExactComplex(c));
    }
    return canonicalize(Space::cotangent(), std::move(raw));
}

ExactDeformation embed(const ExactSeries &f, unsigned order)
{
    return ExactDeformation::embed(f, order);
}

} // namespace

SuiteReport axioms_suite(const AxiomOptions &options)
{
    SuiteReport report;
    report.suite = "axioms";
    report.seed = options.seed;
    const auto &loop = options.loop;
    loop.validate();
    const Space lspace = loop.space();
    const Space cspace = Space::cotangent();

    for (std::size_t n = 0; n < options.wick_trials; ++n) {
        auto rng = Sampler::substream(options.seed, n);
        const auto f = draw(rng, Space::loop(2), 3, 0, 5, 30);
        const auto g = draw(rng, Space::loop(2), 3, 0, 5, 30);
        const auto h = draw(rng, Space::loop(2), 3, 0, 5, 30);
        report.tally("wick_commutative").record(wick_product(f, g) == wick_product(g, f), trial(n));
        report.tally("wick_associative")
            .record(wick_product(wick_product(f, g), h) == wick_product(f, wick_product(g, h)), trial(n));
        report.tally("wick_unit").record(wick_product(f, one(f.space())) == f, trial(n));
    }

    for (std::size_t n = 0; n < options.poisson_trials; ++n) {
        auto rng = Sampler::substream(options.seed ^ 0x9e3779b97f4a7c15ULL, n);
        const bool cot = n % 2 == 1;
        const Space space = cot ? cspace : lspace;
        const SymplecticModel model =
            cot ? SymplecticModel{CotangentModel{DiagonalOperator::zero(), n % 4 == 1 ? 1 : -1}} : SymplecticModel{loop};
        const auto f = draw(rng, space, 3, 0, 4, 8);
        const auto g = draw(rng, space, 3, 0, 4, 8);
        const auto h = draw(rng, space, 3, 0, 4, 8);
        auto br = [&](const ExactSeries &x, const ExactSeries &y) { return poisson_bracket(x, y, model); };
        const std::string what = trial(n) + (cot ? " (cotangent)" : " (loop)");
        report.tally("bracket_antisymmetric").record(br(f, g) == scaled(br(g, f), Rational(-1)), what);
        report.tally("bracket_jacobi")
            .record((br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))).is_zero(), what);
        report.tally("bracket_leibniz")
            .record(br(f, wick_product(g, h)) == wick_product(br(f, g), h) + wick_product(g, br(f, h)), what);
        report.tally("bracket_constants")
            .record(br(one(space), f).is_zero() && br(f, scaled(one(space), Rational(3, 2))).is_zero(), what);
    }

    const std::vector<StarConvention> conventions{StarConvention::paper(), StarConvention::bracket_normalized()};
    for (std::size_t n = 0; n < options.star_trials; ++n) {
        auto rng = Sampler::substream(options.seed ^ 0x51afd7ed558ccd1dULL, n);
        const auto f = draw(rng, lspace, 3, 0, 4, 20);
        const auto g = draw(rng, lspace, 3, 0, 4, 20);
        const auto h = draw(rng, lspace, 3, 0, 4, 20);
        const std::string what = trial(n);
        // Presets alternate with a random prefactor.
        StarConvention conv = n % 3 < 2 ? conventions[n % 3] : StarConvention{rng.rational(3)};
        if (sgn(conv.prefactor) == 0) {
            conv.prefactor = Rational(1, 3);
        }
        const LoopProduct product{loop, conv};
        const auto fg = star(f, g, options.order, loop, conv);
        report.tally("star_slot0_is_wick").record(fg.slot(0) == wick_product(f, g), what);
        for (const auto &c : conventions) {
            const auto lhs = p_l(f, g, 1, loop, c) - p_l(g, f, 1, loop, c);
            const auto rhs = scaled(poisson_bracket(f, g, SymplecticModel{loop}), Rational(2) * c.prefactor);
            report.tally("star_p1_antisymmetric_part").record(lhs == rhs, what + " prefactor " + format_rational(c.prefactor));
        }
        bool vanish = true;
        for (unsigned l = 1; l <= options.order; ++l) {
            vanish = vanish && p_l(f, one(lspace), l, loop, conv).is_zero() && p_l(one(lspace), f, l, loop, conv).is_zero();
        }
        report.tally("star_vanishes_on_constants").record(vanish, what);
        const auto left3 = d_star(fg, embed(h, options.order), ProductSpec{product});
        const auto right3 = d_star(embed(f, options.order), star(g, h, options.order, loop, conv), ProductSpec{product});
        report.tally("star_associative")
            .record((left3 - right3).is_zero(), what + " prefactor " + format_rational(conv.prefactor));

        // Homogeneous inputs: slot l has degree deg f + deg g - 2l.
        const int df = static_cast<int>(rng.uniform(0, 4));
        const int dg = static_cast<int>(rng.uniform(0, 4));
        const auto fh = draw(rng, lspace, 3, df, df, 6);
        const auto gh = draw(rng, lspace, 3, dg, dg, 6);
        const auto s = star(fh, gh, options.order, loop, conv);
        bool degrees = true;
        for (unsigned l = 0; l <= options.order; ++l) {
            degrees = degrees && (s.slot(l).is_zero() || s.slot(l).is_homogeneous(static_cast<unsigned>(df + dg - 2 * static_cast<int>(l))));
        }
        report.tally("star_degree_bookkeeping").record(degrees, what);

        // *_h^A with random eigenvalues on the cotangent model.
        const auto A = random_diagonal(rng, 3);
        const auto a = draw(rng, cspace, 3, 0, 3, 6);
        const auto b = draw(rng, cspace, 3, 0, 3, 6);
        const auto c = draw(rng, cspace, 3, 0, 3, 6);
        CotangentConvention cconv;
        cconv.prefactor = n % 2 == 0 ? Rational(1) : Rational(-1, 2);
        cconv.bracket_sign = n % 4 < 2 ? 1 : -1;
        const CotangentProduct cprod{A, cconv};
        const unsigned order_a = std::min(options.order, 3u);
        const auto left = d_star(star_a(a, b, order_a, A, cconv), embed(c, order_a), ProductSpec{cprod});
        const auto right = d_star(embed(a, order_a), star_a(b, c, order_a, A, cconv), ProductSpec{cprod});
        report.tally("star_a_associative").record((left - right).is_zero(), what);

        const int d = static_cast<int>(rng.uniform(0, 5));
        const auto x = draw(rng, cspace, 3, d, d, 6);
        const auto t = t1(x, A, cconv.t1_sign);
        report.tally("t1_lowers_degree_by_two")
            .record(t.is_zero() || (d >= 2 && t.is_homogeneous(static_cast<unsigned>(d - 2))), what);
        const auto tp = t_prime(x, A, static_cast<unsigned>(d / 2 + 2), cconv.t1_sign);
        bool tail_zero = true;
        for (unsigned m = static_cast<unsigned>(d / 2) + 1; m <= tp.order(); ++m) {
            tail_zero = tail_zero && tp.slot(m).is_zero();
        }
        report.tally("tprime_slot_count").record(tail_zero, what);
    }
    report.details = {{"wick_trials", options.wick_trials},
                      {"poisson_trials", options.poisson_trials},
                      {"star_trials", options.star_trials},
                      {"order", options.order},
                      {"loop_model", io::model_to_json(SymplecticModel{loop})},
                      {"star_prefactors", "-1/2, 1 and a random rational, by trial"}};
    return report;
}

SuiteReport oracle_suite(const OracleOptions &options)
{
    SuiteReport report;
    report.suite = "oracle";
    report.seed = options.seed;
    const int kmax = options.kmax;
    const int D = options.max_degree;
    const Space lspace = Space::loop(2);
    const Space cspace = Space::cotangent();
    const auto lbasis = std::make_shared<const oracle::DenseBasis>(lspace, kmax, 2 * D);
    const auto cbasis = std::make_shared<const oracle::DenseBasis>(cspace, kmax, 2 * D);
    const LoopModel loop;

    for (std::size_t n = 0; n < options.trials; ++n) {
        auto rng = Sampler::substream(options.seed ^ 0x2545f4914f6cdd1dULL, n);
        const std::string what = trial(n);
        auto dense = [&](const ExactSeries &x) {
            return oracle::DenseFockVector::from_sparse(x, x.space() == lspace ? lbasis : cbasis);
        };
        auto same = [&](const ExactSeries &sparse, const oracle::DenseFockVector &ref) {
            return sparse == ref.to_sparse();
        };

        const auto f = draw(rng, lspace, kmax, 0, D, 8);
        const auto g = draw(rng, lspace, kmax, 0, D, 8);
        report.tally("wick").record(same(wick_product(f, g), oracle::wick(dense(f), dense(g))), what);

        const BasisIndex a = rng.basis_index(lspace, kmax);
        report.tally("annihilate").record(same(annihilate(f, a), oracle::annihilate(dense(f), a)), what);

        const bool cot = n % 2 == 1;
        const SymplecticModel bmodel = cot ? SymplecticModel{CotangentModel{DiagonalOperator::zero(), n % 4 == 1 ? 1 : -1}}
                                           : SymplecticModel{loop};
        const auto bf = cot ? draw(rng, cspace, kmax, 0, D, 8) : f;
        const auto bg = cot ? draw(rng, cspace, kmax, 0, D, 8) : g;
        report.tally("bracket").record(same(poisson_bracket(bf, bg, bmodel), oracle::bracket(dense(bf), dense(bg), bmodel)),
                                       what);

        const unsigned l = 1 + static_cast<unsigned>(n % 3);
        const Rational prefactor = n % 2 == 0 ? Rational(-1, 2) : Rational(1);
        report.tally("p_l").record(
            same(p_l(f, g, l, loop, StarConvention{prefactor}), oracle::p_l(dense(f), dense(g), l, loop, prefactor)),
            what + " l = " + std::to_string(l));

        const auto A = random_diagonal(rng, kmax);
        const CotangentModel cmodel{A, n % 3 == 0 ? -1 : 1};
        const auto cf = draw(rng, cspace, kmax, 0, D, 8);
        const auto cg = draw(rng, cspace, kmax, 0, D, 8);
        const unsigned r = 1 + static_cast<unsigned>((n / 3) % 3);
        report.tally("c_r_a").record(same(c_r_a(cf, cg, r, cmodel), oracle::c_r_a(dense(cf), dense(cg), r, cmodel)),
                                     what + " r = " + std::to_string(r));

        const int sign = n % 2 == 0 ? -1 : 1;
        report.tally("t1").record(same(t1(cf, A, sign), oracle::t1(dense(cf), A, sign)), what);

        const bool on_loop = n % 2 == 0;
        const auto xi = draw(rng, on_loop ? lspace : cspace, kmax, 1, 1, 3);
        const int cap = static_cast<int>(rng.uniform(0, D));
        const auto &basis = on_loop ? lbasis : cbasis;
        report.tally("wick_exp").record(same(wick_exponential(xi, cap), oracle::wick_exp(xi, basis).truncated(cap)),
                                        what);
    }
    report.details = {{"trials", options.trials},
                      {"kmax", kmax},
                      {"max_degree", D},
                      {"dense_basis_size", {{"loop", lbasis->size()}, {"cotangent", cbasis->size()}}}};
    return report;
}

std::optional<CotangentConvention> calibrated_convention(const CalibrationResult &result)
{
    if (result.selected) {
        return result.selected;
    }
    for (const auto &c : result.candidates) {
        if (c.passed) {
            return c.convention;
        }
    }
    return std::nullopt;
}

namespace
{

// Default eigenvalues lambda_m = m.
DiagonalOperator default_operator()
{
    return DiagonalOperator::from_formula(Rational(1), 1, {Rational(1), 1.0});
}

std::optional<CotangentConvention> resolve_convention(const std::optional<CotangentConvention> &given,
                                                      const std::optional<DiagonalOperator> &A, SuiteReport &report)
{
    if (given) {
        report.details["convention_source"] = "given";
        return given;
    }
    const auto result = calibrate(A ? *A : default_operator());
    report.details["calibration"] = io::calibration_to_json(result);
    report.details["convention_source"] = "calibrated";
    const auto conv = calibrated_convention(result);
    report.tally("calibration").record(conv.has_value(), "no convention tuple passes the calibration probes");
    return conv;
}

} // namespace

SuiteReport gauge_suite(const GaugeOptions &options)
{
    SuiteReport report;
    report.suite = "gauge";
    report.seed = options.seed;
    const auto conv = resolve_convention(options.convention, options.A, report);
    if (!conv) {
        return report;
    }
    report.convention = convention_fields(*conv);
    const Space cspace = Space::cotangent();
    const unsigned L = options.order;
    const int cap = options.exact_degree + 2 * static_cast<int>(L);

    for (std::size_t n = 0; n < options.polynomial_trials; ++n) {
        auto rng = Sampler::substream(options.seed ^ 0x6a09e667f3bcc909ULL, n);
        const auto A = options.A ? *options.A : random_diagonal(rng, 3);
        const auto f = draw(rng, cspace, 3, 0, 4, 8);
        const auto g = draw(rng, cspace, 3, 0, 4, 8);
        const auto r = gauge_equivalence_check(f, g, A, L, *conv);
        report.tally("gauge_polynomial").record(r.passed, trial(n));
    }
    for (std::size_t n = 0; n < options.exponential_trials; ++n) {
        auto rng = Sampler::substream(options.seed ^ 0xbb67ae8584caa73bULL, n);
        const auto A = options.A ? *options.A : random_diagonal(rng, 2);
        const int modes = 1 + static_cast<int>(n % 2);
        const auto f = wick_exponential_pair(direction(rng, 2, modes), direction(rng, 2, modes), cap);
        const auto g = wick_exponential_pair(direction(rng, 2, modes), direction(rng, 2, modes), cap);
        const auto r = gauge_equivalence_check(f, g, A, L, *conv);
        bool ok = r.passed && r.exact_degree && *r.exact_degree >= options.exact_degree;
        report.tally("gauge_wick_exponential").record(ok, trial(n) + " (" + std::to_string(modes) + " mode)");
    }
    report.details["order"] = L;
    report.details["exact_degree"] = options.exact_degree;
    report.details["input_cap"] = cap;
    report.details["eigenvalues"] = options.A ? io::diagonal_to_json(*options.A) : io::Json("random per trial");
    return report;
}

SuiteReport exchange_suite(const ExchangeOptions &options)
{
    SuiteReport report;
    report.suite = "exchange";
    report.seed = options.seed;
    const auto conv = resolve_convention(options.convention, options.A, report);
    if (!conv) {
        return report;
    }
    report.convention = convention_fields(*conv);
    for (std::size_t n = 0; n < options.trials; ++n) {
        auto rng = Sampler::substream(options.seed ^ 0x3c6ef372fe94f82bULL, n);
        const auto A = options.A ? *options.A : random_diagonal(rng, 2);
        const int modes = 1 + static_cast<int>(n % 2);
        ExchangeDirections<ExactComplex> dirs{direction(rng, 2, modes), direction(rng, 2, modes),
                                              direction(rng, 2, modes), direction(rng, 2, modes)};
        const auto r = exchange_check(dirs, A, options.exact_degree, options.order, *conv);
        report.tally("exchange_formula").record(r.passed, trial(n) + " (" + std::to_string(modes) + " mode)");
    }
    report.details["order"] = options.order;
    report.details["exact_degree"] = options.exact_degree;
    report.details["eigenvalues"] = options.A ? io::diagonal_to_json(*options.A) : io::Json("random per trial");
    return report;
}

SuiteReport norms_suite(const NormsOptions &options)
{
    SuiteReport report;
    report.suite = "norms";
    report.seed = options.seed;
    const auto &p = options.params;
    p.validate();

    const auto nuc = nuclearity_sum(p, options.kmax, options.n, options.max_degree);
    // Independent recheck of the precondition: the largest ratio sits at k = 0.
    const double x0 = p.C;
    report.tally("nuclearity_precondition").record(nuc.summable == (x0 < 1.0),
                                                   "summability flag disagrees with x_0 = C = " + format_double(x0));
    if (nuc.summable) {
        const double rel = std::abs(nuc.direct - nuc.closed_form) / nuc.closed_form;
        report.tally("nuclearity_direct_vs_closed_form")
            .record(rel <= 1e-6, "relative difference " + format_double(rel));
        report.tally("nuclearity_direct_below_product").record(nuc.direct <= nuc.product * (1 + 1e-12), "direct > product");
        report.tally("nuclearity_total_finite")
            .record(std::isfinite(nuc.total_bound) && std::isfinite(nuc.tail_bound), "non-finite total");
    }
    report.details["nuclearity"] = io::mode_sum_to_json(nuc, io::params_to_json(p));
    if (options.embedding_to) {
        const auto hs = hs_embedding_norm(p, *options.embedding_to, options.kmax, options.n, options.max_degree);
        if (hs.summable) {
            const double rel = std::abs(hs.direct - hs.closed_form) / hs.closed_form;
            report.tally("hs_direct_vs_closed_form").record(rel <= 1e-6, "relative difference " + format_double(rel));
        }
        report.details["hs_embedding"] = io::mode_sum_to_json(
            hs, {{"from", io::params_to_json(p)}, {"to", io::params_to_json(*options.embedding_to)}});
    }

    const Space space = Space::loop(options.n);
    for (std::size_t n = 0; n < options.trials; ++n) {
        auto rng = Sampler::substream(options.seed ^ 0xa54ff53a5f1d36f1ULL, n);
        const auto f = to_float(draw(rng, space, 5, 0, 4, 8));
        const auto g = to_float(draw(rng, space, 5, 0, 4, 8));
        const std::string what = trial(n);
        NormParams q = p;
        q.r = p.r + static_cast<double>(rng.uniform(0, 4));
        q.C = p.C * (1.0 + rng.unit());
        report.tally("norm_monotone").record(hida_norm(f, p) <= hida_norm(f, q) * (1 + 1e-12), what);
        const auto a = rng.multi_index(space, 5, static_cast<int>(rng.uniform(0, 4)));
        const auto b = rng.multi_index(space, 5, static_cast<int>(rng.uniform(0, 4)));
        const double wab = hida_weight(merge(a, b), p);
        const double prod = hida_weight(a, p) * hida_weight(b, p);
        report.tally("weight_multiplicative").record(std::abs(wab - prod) <= 1e-12 * prod, what);
        if (p.r == std::floor(p.r) && static_cast<long>(p.r) % 2 == 0) {
            const double exact = hida_weight_exact(a, static_cast<unsigned>(p.r), Rational(p.C1)).get_d();
            report.tally("weight_exact_cross_check")
                .record(std::abs(exact - hida_weight(a, p)) <= 1e-12 * exact, what);
        }
        const double alpha = 2.0 * rng.unit() - 1.0;
        report.tally("norm_homogeneous")
            .record(std::abs(hida_norm(scaled(f, FloatComplex(alpha, 0.0)), p) - std::abs(alpha) * hida_norm(f, p))
                        <= 1e-9 * std::max(1.0, hida_norm(f, p)),
                    what);
        report.tally("norm_triangle")
            .record(hida_norm(f + g, p) <= hida_norm(f, p) + hida_norm(g, p) + 1e-9, what);
    }
    report.details["trials"] = options.trials;
    return report;
}

SuiteReport probe_suite(const ProbeOptions &options)
{
    SuiteReport report;
    report.suite = "probe";
    report.seed = options.config.seed;
    const auto first = continuity_probe(options.config);
    const auto second = continuity_probe(options.config);
    const auto doc = io::probe_to_json(first);
    report.tally("probe_deterministic").record(doc == io::probe_to_json(second), "re-run differs");
    report.tally("probe_finite").record(std::isfinite(first.K_hat), "K_hat is not finite");
    if (options.golden) {
        report.tally("probe_matches_golden").record(doc == *options.golden, "report differs from the golden fixture");
    }
    report.details["probe"] = doc;
    return report;
}

} // namespace hida::checks
