#include "iesp/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "iesp/errors.hpp"

namespace iesp::fuzzy {

MembershipFunction::MembershipFunction(std::string label, std::vector<double> breakpoints)
    : label_(std::move(label)), points_(std::move(breakpoints)) {
    if (points_.size() == 3)
        points_.insert(points_.begin() + 1, points_[1]);
    if (points_.size() != 4)
        throw ConfigError("membership function '" + label_ + "' needs 3 or 4 breakpoints");
    for (double p : points_) {
        if (!std::isfinite(p))
            throw ConfigError("membership function '" + label_ + "' has a non-finite breakpoint");
    }
    if (!std::is_sorted(points_.begin(), points_.end()))
        throw ConfigError("membership function '" + label_ + "' breakpoints must be non-decreasing");
}

double MembershipFunction::degree(double x) const {
    const double a = points_[0], b = points_[1], c = points_[2], d = points_[3];
    if (x < a)
        return 0.0;
    if (x < b)
        return (x - a) / (b - a);
    if (x <= c)
        return 1.0;
    if (x < d)
        return (d - x) / (d - c);
    return 0.0;
}

double MembershipFunction::center() const {
    return 0.5 * (points_[1] + points_[2]);
}

Variable::Variable(std::string name, double min, double max, std::vector<MembershipFunction> terms)
    : name_(std::move(name)), min_(min), max_(max), terms_(std::move(terms)) {
    if (!(min_ < max_))
        throw ConfigError("variable '" + name_ + "': universe min must be below max");
    if (terms_.empty())
        throw ConfigError("variable '" + name_ + "' has no terms");

    std::set<std::string> labels;
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (!labels.insert(terms_[i].label()).second)
            throw ConfigError("variable '" + name_ + "': duplicate label '" + terms_[i].label() + "'");
        if (i > 0 && !(terms_[i].center() > terms_[i - 1].center()))
            throw ConfigError("variable '" + name_ + "': term centers must be strictly increasing");
    }

    // Coverage: the degree sum is piecewise linear, so probing every knot,
    // both sides of it, and every midpoint between knots is exhaustive.
    std::vector<double> knots{min_, max_};
    for (const auto& t : terms_) {
        for (double p : t.breakpoints()) {
            if (p >= min_ && p <= max_)
                knots.push_back(p);
        }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    std::vector<double> probes;
    const double eps = 1e-9 * (max_ - min_);
    for (std::size_t i = 0; i < knots.size(); ++i) {
        probes.push_back(knots[i]);
        probes.push_back(std::clamp(knots[i] - eps, min_, max_));
        probes.push_back(std::clamp(knots[i] + eps, min_, max_));
        if (i + 1 < knots.size())
            probes.push_back(0.5 * (knots[i] + knots[i + 1]));
    }
    for (double x : probes) {
        double total = 0.0;
        for (const auto& t : terms_)
            total += t.degree(x);
        if (!(total > 0.0))
            throw ConfigError("variable '" + name_ + "': no term covers x = " + std::to_string(x));
    }
}

Variable Variable::with_triangles(std::string name,
                                  double min,
                                  double max,
                                  const std::vector<std::pair<std::string, double>>& centers) {
    if (centers.empty())
        throw ConfigError("variable '" + name + "' has no terms");
    std::vector<MembershipFunction> terms;
    const std::size_t n = centers.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double c = centers[i].second;
        const double left = i == 0 ? std::min(min, c) : centers[i - 1].second;
        const double right = i + 1 == n ? std::max(max, c) : centers[i + 1].second;
        if (i == 0 && i + 1 == n)
            terms.emplace_back(centers[i].first, std::vector<double>{left, left, right, right});
        else if (i == 0)
            terms.emplace_back(centers[i].first, std::vector<double>{left, left, c, right});
        else if (i + 1 == n)
            terms.emplace_back(centers[i].first, std::vector<double>{left, c, right, right});
        else
            terms.emplace_back(centers[i].first, std::vector<double>{left, c, right});
    }
    return Variable(std::move(name), min, max, std::move(terms));
}

std::size_t Variable::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].label() == label)
            return i;
    }
    throw ConfigError("variable '" + name_ + "' has no term '" + std::string(label) + "'");
}

std::vector<double> Variable::fuzzify(double x) const {
    const double clamped = std::clamp(x, min_, max_);
    std::vector<double> degrees;
    degrees.reserve(terms_.size());
    for (const auto& t : terms_)
        degrees.push_back(t.degree(clamped));
    return degrees;
}

RuleBase::RuleBase(std::string name,
                   std::vector<Variable> inputs,
                   std::string output_name,
                   std::vector<Consequent> consequents,
                   std::vector<Rule> rules)
    : name_(std::move(name)),
      inputs_(std::move(inputs)),
      output_name_(std::move(output_name)),
      consequents_(std::move(consequents)),
      rules_(std::move(rules)) {
    const std::string where = "rule base '" + name_ + "': ";
    if (inputs_.empty() || inputs_.size() > 2)
        throw ConfigError(where + "expects 1 or 2 input variables");
    if (consequents_.empty())
        throw ConfigError(where + "has no consequents");
    std::set<std::string> labels;
    for (const auto& c : consequents_) {
        if (!labels.insert(c.label).second)
            throw ConfigError(where + "duplicate consequent '" + c.label + "'");
        if (!std::isfinite(c.value))
            throw ConfigError(where + "consequent '" + c.label + "' is not finite");
    }

    std::size_t combinations = 1;
    for (const auto& v : inputs_)
        combinations *= v.size();

    std::set<std::vector<std::size_t>> seen;
    for (const auto& r : rules_) {
        if (r.antecedent.size() != inputs_.size())
            throw ConfigError(where + "rule arity does not match the number of inputs");
        for (std::size_t i = 0; i < inputs_.size(); ++i) {
            if (r.antecedent[i] >= inputs_[i].size())
                throw ConfigError(where + "rule references a missing term of '" + inputs_[i].name() + "'");
        }
        if (r.consequent >= consequents_.size())
            throw ConfigError(where + "rule references a missing consequent");
        if (!seen.insert(r.antecedent).second)
            throw ConfigError(where + "antecedent combination listed twice");
    }
    if (seen.size() != combinations)
        throw ConfigError(where + "rule table covers " + std::to_string(seen.size()) + " of " +
                          std::to_string(combinations) + " antecedent combinations");
}

std::size_t RuleBase::consequent_index(std::string_view label) const {
    for (std::size_t i = 0; i < consequents_.size(); ++i) {
        if (consequents_[i].label == label)
            return i;
    }
    throw ConfigError("rule base '" + name_ + "' has no consequent '" + std::string(label) + "'");
}

double RuleBase::constant(std::string_view label) const {
    return consequents_[consequent_index(label)].value;
}

std::vector<double> RuleBase::infer(std::span<const double> inputs) const {
    if (inputs.size() != inputs_.size())
        throw ConfigError("rule base '" + name_ + "' expects " + std::to_string(inputs_.size()) +
                          " inputs, got " + std::to_string(inputs.size()));

    std::vector<std::vector<double>> degrees;
    degrees.reserve(inputs_.size());
    for (std::size_t i = 0; i < inputs_.size(); ++i)
        degrees.push_back(inputs_[i].fuzzify(inputs[i]));

    std::vector<double> activation(consequents_.size(), 0.0);
    for (const auto& r : rules_) {
        double w = 1.0;
        for (std::size_t i = 0; i < r.antecedent.size(); ++i)
            w = std::min(w, degrees[i][r.antecedent[i]]);
        activation[r.consequent] = std::max(activation[r.consequent], w);
    }
    return activation;
}

std::vector<double> RuleBase::infer(const std::map<std::string, double>& inputs) const {
    std::vector<double> ordered;
    for (const auto& v : inputs_) {
        auto it = inputs.find(v.name());
        if (it == inputs.end())
            throw ConfigError("rule base '" + name_ + "': missing input '" + v.name() + "'");
        ordered.push_back(it->second);
    }
    return infer(ordered);
}

std::vector<double> RuleBase::constants() const {
    std::vector<double> values;
    values.reserve(consequents_.size());
    for (const auto& c : consequents_)
        values.push_back(c.value);
    return values;
}

Defuzzified RuleBase::evaluate(std::span<const double> inputs) const {
    const auto activation = infer(inputs);
    const auto values = constants();
    return defuzzify(activation, values);
}

double RuleBase::evaluate(double x) const {
    const double in[] = {x};
    return evaluate(std::span<const double>(in)).value;
}

double RuleBase::evaluate(double x, double y) const {
    const double in[] = {x, y};
    return evaluate(std::span<const double>(in)).value;
}

Defuzzified defuzzify(std::span<const double> activations, std::span<const double> constants) {
    if (activations.size() != constants.size())
        throw ConfigError("defuzzify: activation and constant tables differ in size");
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < activations.size(); ++i) {
        num += activations[i] * constants[i];
        den += activations[i];
    }
    if (!(den > 0.0))
        return {0.0, true};
    return {num / den, false};
}

nlohmann::json RuleBase::to_json() const {
    nlohmann::json doc;
    doc["name"] = name_;
    for (const auto& v : inputs_) {
        nlohmann::json var{{"name", v.name()}, {"min", v.min()}, {"max", v.max()}};
        for (const auto& t : v.terms())
            var["terms"].push_back({{"label", t.label()}, {"points", t.breakpoints()}});
        doc["inputs"].push_back(var);
    }
    doc["output"]["name"] = output_name_;
    for (const auto& c : consequents_)
        doc["output"]["constants"][c.label] = c.value;
    for (const auto& r : rules_) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t i = 0; i < r.antecedent.size(); ++i)
            row.push_back(inputs_[i].terms()[r.antecedent[i]].label());
        row.push_back(consequents_[r.consequent].label);
        doc["rules"].push_back(row);
    }
    return doc;
}

namespace {

Variable variable_from_json(const nlohmann::json& v) {
    const auto name = v.at("name").get<std::string>();
    const double min = v.at("min").get<double>();
    const double max = v.at("max").get<double>();
    const auto& terms = v.at("terms");
    if (!terms.is_array() || terms.empty())
        throw ConfigError("variable '" + name + "': 'terms' must be a non-empty array");

    const bool all_centers =
        std::all_of(terms.begin(), terms.end(), [](const auto& t) { return t.contains("center"); });
    if (all_centers) {
        std::vector<std::pair<std::string, double>> centers;
        for (const auto& t : terms)
            centers.emplace_back(t.at("label").get<std::string>(), t.at("center").get<double>());
        return Variable::with_triangles(name, min, max, centers);
    }
    std::vector<MembershipFunction> mfs;
    for (const auto& t : terms)
        mfs.emplace_back(t.at("label").get<std::string>(), t.at("points").get<std::vector<double>>());
    return Variable(name, min, max, std::move(mfs));
}

}  // namespace

RuleBase rule_base_from_json(const nlohmann::json& doc) {
    try {
        const auto name = doc.at("name").get<std::string>();
        std::vector<Variable> inputs;
        for (const auto& v : doc.at("inputs"))
            inputs.push_back(variable_from_json(v));

        const auto& out = doc.at("output");
        std::vector<Consequent> consequents;
        for (const auto& [label, value] : out.at("constants").items())
            consequents.push_back({label, value.get<double>()});
        // nlohmann orders object keys alphabetically; order by value so the
        // table reads low to high.
        std::stable_sort(consequents.begin(), consequents.end(),
                         [](const Consequent& a, const Consequent& b) { return a.value < b.value; });

        auto consequent_of = [&](const std::string& label) -> std::size_t {
            for (std::size_t i = 0; i < consequents.size(); ++i) {
                if (consequents[i].label == label)
                    return i;
            }
            throw ConfigError("rule base '" + name + "': rule uses unknown consequent '" + label + "'");
        };

        std::vector<Rule> rules;
        for (const auto& row : doc.at("rules")) {
            const auto labels = row.get<std::vector<std::string>>();
            if (labels.size() != inputs.size() + 1)
                throw ConfigError("rule base '" + name + "': each rule needs " +
                                  std::to_string(inputs.size() + 1) + " labels");
            Rule r;
            for (std::size_t i = 0; i < inputs.size(); ++i)
                r.antecedent.push_back(inputs[i].index_of(labels[i]));
            r.consequent = consequent_of(labels.back());
            rules.push_back(std::move(r));
        }
        return RuleBase(name, std::move(inputs), out.at("name").get<std::string>(), std::move(consequents),
                        std::move(rules));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("rule base: ") + e.what());
    }
}

RuleBase load_rule_base(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open rule base file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return rule_base_from_json(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace iesp::fuzzy
