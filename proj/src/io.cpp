#include "hida/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <type_traits>

namespace hida::io
{

Json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        throw InputError(path + ": " + e.what());
    }
}

std::string dump(const Json &doc)
{
    return doc.dump(2) + "\n";
}

void write_text_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write " + path);
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

void write_json_file(const std::string &path, const Json &doc)
{
    write_text_file(path, dump(doc));
}

namespace
{

const Json &field(const Json &doc, const char *name, const std::string &where)
{
    if (!doc.is_object() || !doc.contains(name)) {
        throw InputError(where + ": missing field \"" + name + "\"");
    }
    return doc.at(name);
}

long integer_field(const Json &v, const std::string &where)
{
    if (!v.is_number_integer()) {
        throw InputError(where + ": expected an integer, got " + v.dump());
    }
    return v.get<long>();
}

// Accepts "p/q" strings and JSON integers.
Rational rational_value(const Json &v, const std::string &where)
{
    if (v.is_number_integer()) {
        return Rational(v.get<long>());
    }
    if (!v.is_string()) {
        throw InputError(where + ": expected a rational string, got " + v.dump());
    }
    try {
        return parse_rational(v.get<std::string>());
    } catch (const std::invalid_argument &e) {
        throw InputError(where + ": " + e.what());
    }
}

double real_value(const Json &v, const std::string &where)
{
    if (v.is_number()) {
        return v.get<double>();
    }
    return rational_value(v, where).get_d();
}

std::string term_label(std::size_t n, const Json &term)
{
    std::string text = term.contains("index") ? term.at("index").dump() : "?";
    return "term " + std::to_string(n) + " (index " + text + ")";
}

template <typename T>
T coefficient_value(const Json &term, bool exact_doc, const std::string &where);

template <>
ExactComplex coefficient_value<ExactComplex>(const Json &term, bool exact_doc, const std::string &where)
{
    if (!exact_doc) {
        throw InputError(where + ": a float document cannot be read in exact mode");
    }
    const Json zero = "0";
    return {rational_value(term.contains("re") ? term.at("re") : zero, where + " re"),
            rational_value(term.contains("im") ? term.at("im") : zero, where + " im")};
}

template <>
FloatComplex coefficient_value<FloatComplex>(const Json &term, bool, const std::string &where)
{
    auto part = [&](const char *name) -> double {
        if (!term.contains(name)) {
            return 0.0;
        }
        const Json &v = term.at(name);
        if (v.is_number()) {
            return v.get<double>();
        }
        if (!v.is_string()) {
            throw InputError(where + " " + name + ": expected a number, got " + v.dump());
        }
        const auto text = v.get<std::string>();
        if (text.find('/') != std::string::npos) {
            return rational_value(v, where).get_d();
        }
        try {
            std::size_t used = 0;
            const double d = std::stod(text, &used);
            if (used != text.size()) {
                throw std::invalid_argument(text);
            }
            return d;
        } catch (const std::exception &) {
            return rational_value(v, where + " " + name).get_d();
        }
    };
    return {part("re"), part("im")};
}

MultiIndex index_value(const Json &list, const Space &space, const std::string &where)
{
    if (!list.is_array()) {
        throw InputError(where + ": index must be a list of [k, i, mult] triples");
    }
    std::vector<IndexPower> entries;
    for (const auto &e : list) {
        if (!e.is_array() || e.size() != 3) {
            throw InputError(where + ": index entry " + e.dump() + " is not a [k, i, mult] triple");
        }
        const long k = integer_field(e[0], where);
        const long i = integer_field(e[1], where);
        const long m = integer_field(e[2], where);
        if (m <= 0) {
            throw InputError(where + ": multiplicity must be positive in " + e.dump());
        }
        const BasisIndex a{static_cast<std::int32_t>(k), static_cast<std::int32_t>(i)};
        try {
            space.validate(a);
        } catch (const std::invalid_argument &err) {
            throw InputError(where + ": " + err.what());
        }
        if (!entries.empty() && !(entries.back().index < a)) {
            throw InputError(where + ": index list is not canonical (entries must be strictly increasing in (k, i))");
        }
        entries.push_back({a, static_cast<std::uint32_t>(m)});
    }
    return MultiIndex::from_canonical(entries);
}

std::string signed_text(int s)
{
    return std::to_string(s);
}

} // namespace

template <typename T>
Json series_to_json(const FockSeries<T> &f)
{
    Json doc;
    doc["mode"] = std::string(to_string(ScalarTraits<T>::mode));
    doc["model"] = std::string(to_string(f.space().kind));
    doc["dimension"] = f.space().dimension;
    if (f.degree_cap()) {
        doc["degree_cap"] = *f.degree_cap();
    }
    Json terms = Json::array();
    for (const auto &t : f.terms()) {
        Json index = Json::array();
        for (const auto &e : t.index.entries()) {
            index.push_back({e.index.k, e.index.i, e.mult});
        }
        terms.push_back({{"index", index},
                         {"re", ScalarTraits<T>::format_re(t.coeff)},
                         {"im", ScalarTraits<T>::format_im(t.coeff)}});
    }
    doc["terms"] = std::move(terms);
    return doc;
}

template <typename T>
FockSeries<T> series_from_json(const Json &doc)
{
    const std::string where = "series";
    const auto mode_text = field(doc, "mode", where);
    if (!mode_text.is_string()) {
        throw InputError("series: \"mode\" must be \"exact\" or \"float\"");
    }
    ScalarMode mode;
    try {
        mode = parse_scalar_mode(mode_text.get<std::string>());
    } catch (const std::invalid_argument &e) {
        throw InputError(std::string("series: ") + e.what());
    }
    if (std::is_same_v<T, ExactComplex> && mode == ScalarMode::floating) {
        throw InputError("series: a float document cannot be read in exact mode");
    }
    Space space;
    try {
        space.kind = parse_model_kind(field(doc, "model", where).get<std::string>());
        space.dimension = static_cast<int>(integer_field(field(doc, "dimension", where), "series dimension"));
        space.validate();
    } catch (const Json::exception &e) {
        throw InputError(std::string("series: ") + e.what());
    } catch (const std::invalid_argument &e) {
        throw InputError(std::string("series: ") + e.what());
    }
    std::optional<int> cap;
    if (doc.contains("degree_cap") && !doc.at("degree_cap").is_null()) {
        cap = static_cast<int>(integer_field(doc.at("degree_cap"), "series degree_cap"));
    }
    const auto &terms = field(doc, "terms", where);
    if (!terms.is_array()) {
        throw InputError("series: \"terms\" must be a list");
    }
    std::vector<std::pair<MultiIndex, T>> raw;
    std::map<MultiIndex, std::size_t> seen;
    for (std::size_t n = 0; n < terms.size(); ++n) {
        const auto &term = terms[n];
        const auto label = term_label(n, term);
        if (!term.is_object()) {
            throw InputError(label + ": a term must be an object");
        }
        auto index = index_value(field(term, "index", label), space, label);
        auto [it, fresh] = seen.emplace(index, n);
        if (!fresh) {
            throw InputError(label + ": repeats the multiindex of term " + std::to_string(it->second));
        }
        if (cap && static_cast<int>(index.degree()) > *cap) {
            throw InputError(label + ": degree " + std::to_string(index.degree()) + " exceeds the degree cap "
                             + std::to_string(*cap));
        }
        raw.emplace_back(std::move(index), coefficient_value<T>(term, mode == ScalarMode::exact, label));
    }
    return canonicalize(space, std::move(raw), cap, 0.0);
}

Json diagonal_to_json(const DiagonalOperator &A)
{
    Json lambda;
    if (A.is_formula()) {
        lambda["formula"] = {{"c", format_rational(A.formula_coefficient())}, {"alpha", A.formula_exponent()}};
    } else {
        Json table = Json::object();
        for (const auto &[m, v] : A.table()) {
            table[std::to_string(m)] = format_rational(v);
        }
        lambda["table"] = std::move(table);
    }
    return lambda;
}

Json model_to_json(const SymplecticModel &model)
{
    if (const auto *loop = std::get_if<LoopModel>(&model)) {
        return {{"variant", "loop"}, {"n", loop->n}, {"C", format_rational(loop->C)}, {"sigma", loop->sigma}};
    }
    const auto &cot = std::get<CotangentModel>(model);
    return {{"variant", "cotangent"},
            {"lambda", diagonal_to_json(cot.A)},
            {"growth", {{"C", format_rational(cot.A.growth().C)}, {"alpha", cot.A.growth().alpha}}}};
}

DiagonalOperator diagonal_from_json(const Json &doc)
{
    if (!doc.is_object()) {
        throw InputError("eigenvalues: expected an object");
    }
    const Json &lambda = doc.contains("lambda") ? doc.at("lambda") : doc;
    DiagonalOperator::Growth growth;
    if (doc.contains("growth")) {
        const auto &g = doc.at("growth");
        growth.C = rational_value(field(g, "C", "growth"), "growth C");
        growth.alpha = real_value(field(g, "alpha", "growth"), "growth alpha");
    }
    try {
        if (lambda.contains("formula")) {
            const auto &f = lambda.at("formula");
            const long alpha = integer_field(field(f, "alpha", "lambda formula"), "lambda formula alpha");
            if (alpha < 0) {
                throw InputError("lambda formula: alpha must be a nonnegative integer");
            }
            return DiagonalOperator::from_formula(rational_value(field(f, "c", "lambda formula"), "lambda formula c"),
                                                  static_cast<unsigned>(alpha), growth);
        }
        if (lambda.contains("table")) {
            const auto &t = lambda.at("table");
            if (!t.is_object()) {
                throw InputError("lambda table: expected an object of mode -> rational");
            }
            std::map<int, Rational> table;
            for (const auto &[key, value] : t.items()) {
                int mode = 0;
                try {
                    std::size_t used = 0;
                    mode = std::stoi(key, &used);
                    if (used != key.size()) {
                        throw std::invalid_argument(key);
                    }
                } catch (const std::exception &) {
                    throw InputError("lambda table: mode \"" + key + "\" is not an integer");
                }
                table[mode] = rational_value(value, "lambda table entry " + key);
            }
            return DiagonalOperator::from_table(std::move(table), growth);
        }
    } catch (const std::invalid_argument &e) {
        throw InputError(std::string("lambda: ") + e.what());
    } catch (const std::domain_error &e) {
        throw InputError(std::string("lambda: ") + e.what());
    }
    throw InputError("lambda: expected a \"table\" or a \"formula\"");
}

SymplecticModel model_from_json(const Json &doc)
{
    const auto variant = field(doc, "variant", "model");
    if (variant == "loop") {
        LoopModel m;
        if (doc.contains("n")) {
            m.n = static_cast<int>(integer_field(doc.at("n"), "model n"));
        }
        if (doc.contains("C")) {
            m.C = rational_value(doc.at("C"), "model C");
        }
        if (doc.contains("sigma")) {
            m.sigma = static_cast<int>(integer_field(doc.at("sigma"), "model sigma"));
        }
        try {
            m.validate();
        } catch (const std::invalid_argument &e) {
            throw InputError(e.what());
        }
        return m;
    }
    if (variant == "cotangent") {
        return CotangentModel{diagonal_from_json(doc), 1};
    }
    throw InputError("model: variant must be \"loop\" or \"cotangent\", got " + variant.dump());
}

Json convention_to_json(const ConventionFields &fields)
{
    Json out = Json::object();
    for (const auto &[name, value] : fields) {
        if (name == "prefactor") {
            out[name] = value;
        } else {
            out[name] = std::stoi(value);
        }
    }
    return out;
}

Json convention_to_json(const CotangentConvention &conv)
{
    return convention_to_json(convention_fields(conv));
}

CotangentConvention cotangent_convention_from_json(const Json &doc)
{
    const Json &c = doc.contains("convention") ? doc.at("convention") : doc;
    CotangentConvention conv;
    conv.prefactor = rational_value(field(c, "prefactor", "convention"), "convention prefactor");
    auto sign = [&](const char *name) {
        const long v = integer_field(field(c, name, "convention"), std::string("convention ") + name);
        if (v != 1 && v != -1) {
            throw InputError(std::string("convention ") + name + ": must be 1 or -1, got " + signed_text(static_cast<int>(v)));
        }
        return static_cast<int>(v);
    };
    conv.bracket_sign = sign("bracket_sign");
    conv.t1_sign = sign("t1_sign");
    conv.exchange_shift = sign("exchange_shift");
    return conv;
}

template <typename T>
Json deformation_to_json(const DeformationSeries<T> &x, const ConventionFields &convention)
{
    Json slots = Json::array();
    for (const auto &s : x.slots()) {
        slots.push_back(series_to_json(s));
    }
    Json doc;
    doc["order"] = x.order();
    doc["slots"] = std::move(slots);
    doc["convention"] = convention_to_json(convention);
    const auto d = x.exact_degree();
    doc["exact_degree"] = d ? Json(*d) : Json(nullptr);
    return doc;
}

namespace
{

Json number(double v)
{
    if (std::isfinite(v)) {
        return v;
    }
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

} // namespace

Json residual_to_json(const ResidualReport &report)
{
    Json residuals = Json::array();
    for (double r : report.max_residual_per_slot) {
        residuals.push_back(number(r));
    }
    Json doc;
    doc["identity"] = report.identity;
    doc["max_residual_per_slot"] = std::move(residuals);
    doc["convention"] = convention_to_json(report.convention);
    doc["exact"] = report.exact;
    doc["passed"] = report.passed;
    doc["exact_degree"] = report.exact_degree ? Json(*report.exact_degree) : Json(nullptr);
    return doc;
}

Json calibration_to_json(const CalibrationResult &result)
{
    Json candidates = Json::array();
    for (const auto &c : result.candidates) {
        candidates.push_back({{"convention", convention_to_json(c.convention)},
                              {"gauge_residual", number(c.gauge_residual)},
                              {"exchange_residual", number(c.exchange_residual)},
                              {"passed", c.passed}});
    }
    Json doc;
    doc["status"] = std::string(to_string(result.status));
    doc["probe_mode"] = result.probe_mode;
    doc["probe_lambda"] = format_rational(result.probe_lambda);
    doc["convention"] = result.selected ? convention_to_json(*result.selected) : Json(nullptr);
    doc["candidates"] = std::move(candidates);
    return doc;
}

Json params_to_json(const NormParams &p)
{
    return {{"r", p.r}, {"C", p.C}, {"C1", p.C1}};
}

Json mode_sum_to_json(const ModeSumReport &report, const Json &params)
{
    Json doc;
    doc["params"] = params;
    doc["kmax"] = report.kmax;
    doc["n"] = report.n;
    doc["max_degree"] = report.max_degree;
    doc["summable"] = report.summable;
    if (!report.diagnostic.empty()) {
        doc["diagnostic"] = report.diagnostic;
    }
    doc["retained_modes"] = report.retained_modes;
    doc["x_max"] = number(report.x_max);
    if (report.summable) {
        doc["direct"] = number(report.direct);
        doc["closed_form"] = number(report.closed_form);
        doc["relative_difference"] =
            number(std::abs(report.direct - report.closed_form) / std::max(std::abs(report.closed_form), 1e-300));
        doc["product"] = number(report.product);
        doc["tail_bound"] = number(report.tail_bound);
        doc["tail_formula"] = report.tail_formula;
        doc["total_bound"] = number(report.total_bound);
    }
    return doc;
}

namespace
{

std::string csv_number(double v)
{
    return std::isfinite(v) ? format_double(v) : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
}

std::string csv_text(const std::string &s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string mode_sum_to_csv(const ModeSumReport &report, const std::string &label)
{
    std::ostringstream out;
    out << "sum,kmax,n,max_degree,summable,retained_modes,x_max,direct,closed_form,product,tail_bound,total_bound,"
           "diagnostic\n";
    out << csv_text(label) << ',' << report.kmax << ',' << report.n << ',' << report.max_degree << ','
        << (report.summable ? "true" : "false") << ',' << report.retained_modes << ',' << csv_number(report.x_max)
        << ',';
    if (report.summable) {
        out << csv_number(report.direct) << ',' << csv_number(report.closed_form) << ','
            << csv_number(report.product) << ',' << csv_number(report.tail_bound) << ','
            << csv_number(report.total_bound);
    } else {
        out << ",,,,";
    }
    out << ',' << csv_text(report.diagnostic) << '\n';
    return out.str();
}

Json probe_to_json(const ProbeReport &report)
{
    const auto &c = report.config;
    Json quantiles = Json::array();
    for (const auto &[p, v] : report.quantiles) {
        quantiles.push_back({{"p", p}, {"value", number(v)}});
    }
    Json doc;
    doc["op"] = std::string(to_string(c.op));
    if (c.op == ProbeOp::p_l) {
        doc["l"] = c.l;
    }
    doc["seed"] = c.seed;
    doc["samples"] = c.samples;
    doc["target"] = params_to_json(c.target);
    doc["source"] = params_to_json(c.source);
    doc["max_degree"] = c.max_degree;
    doc["max_terms"] = c.max_terms;
    doc["kmax"] = c.kmax;
    doc["evaluated"] = report.evaluated;
    doc["skipped_zero_denominator"] = report.skipped_zero_denominator;
    doc["K_hat"] = number(report.K_hat);
    doc["mean"] = number(report.mean);
    doc["quantiles"] = std::move(quantiles);
    doc["sampling"] = report.sampling;
    doc["note"] = "empirical estimate over a finite seeded family; not a bound on the continuity constant";
    return doc;
}

std::string probe_to_csv(const ProbeReport &report)
{
    std::ostringstream out;
    out << "op,seed,samples,evaluated,skipped,K_hat,mean";
    for (const auto &q : report.quantiles) {
        out << ",q" << format_double(q.first);
    }
    out << '\n';
    out << to_string(report.config.op) << ',' << report.config.seed << ',' << report.config.samples << ','
        << report.evaluated << ',' << report.skipped_zero_denominator << ',' << csv_number(report.K_hat) << ','
        << csv_number(report.mean);
    for (const auto &q : report.quantiles) {
        out << ',' << csv_number(q.second);
    }
    out << '\n';
    return out.str();
}

#define HIDA_INSTANTIATE(T)                                                                                   \
    template Json series_to_json(const FockSeries<T> &);                                                      \
    template FockSeries<T> series_from_json<T>(const Json &);                                                 \
    template Json deformation_to_json(const DeformationSeries<T> &, const ConventionFields &);

HIDA_INSTANTIATE(ExactComplex)
HIDA_INSTANTIATE(FloatComplex)

} // namespace hida::io
