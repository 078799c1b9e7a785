#pragma once

// Zero-order fuzzy inference: piecewise-linear membership functions, min
// t-norm for rule antecedents, max aggregation per consequent and a weighted
// average of constant consequents for defuzzification.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace iesp::fuzzy {

// Piecewise-linear membership function given by its breakpoints. Three
// points describe a triangle, four a trapezoid. Coincident breakpoints are
// allowed and produce a vertical edge (a shoulder when it sits on the
// universe boundary).
class MembershipFunction {
  public:
    MembershipFunction(std::string label, std::vector<double> breakpoints);

    const std::string& label() const { return label_; }
    const std::vector<double>& breakpoints() const { return points_; }

    double degree(double x) const;

    // Midpoint of the plateau; the point where degree() == 1.
    double center() const;

  private:
    std::string label_;
    std::vector<double> points_;
};

class Variable {
  public:
    Variable(std::string name, double min, double max, std::vector<MembershipFunction> terms);

    // Triangles with 50% overlap: each term peaks at its own center and
    // reaches zero at the neighbouring centers. The outermost terms are
    // shoulders that stay at 1 out to the universe boundary.
    static Variable with_triangles(std::string name,
                                   double min,
                                   double max,
                                   const std::vector<std::pair<std::string, double>>& centers);

    const std::string& name() const { return name_; }
    double min() const { return min_; }
    double max() const { return max_; }
    const std::vector<MembershipFunction>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    // Throws ConfigError for an unknown label.
    std::size_t index_of(std::string_view label) const;

    // Degree per term, in term order. x is clamped to [min, max] first.
    std::vector<double> fuzzify(double x) const;

  private:
    std::string name_;
    double min_;
    double max_;
    std::vector<MembershipFunction> terms_;
};

struct Rule {
    std::vector<std::size_t> antecedent;  // term index per input variable
    std::size_t consequent;               // index into the consequent table
};

struct Consequent {
    std::string label;
    double value;
};

struct Defuzzified {
    double value = 0.0;
    // Set when every activation was zero; value is then 0.
    bool degenerate = false;
};

class RuleBase {
  public:
    // Validates: 1 or 2 inputs, every antecedent combination covered exactly
    // once, every referenced consequent present.
    RuleBase(std::string name,
             std::vector<Variable> inputs,
             std::string output_name,
             std::vector<Consequent> consequents,
             std::vector<Rule> rules);

    const std::string& name() const { return name_; }
    const std::vector<Variable>& inputs() const { return inputs_; }
    const std::string& output_name() const { return output_name_; }
    const std::vector<Consequent>& consequents() const { return consequents_; }
    const std::vector<Rule>& rules() const { return rules_; }

    std::size_t consequent_index(std::string_view label) const;
    double constant(std::string_view label) const;

    // Activation per consequent, in consequent order.
    std::vector<double> infer(std::span<const double> inputs) const;
    std::vector<double> infer(const std::map<std::string, double>& inputs) const;

    Defuzzified evaluate(std::span<const double> inputs) const;

    double evaluate(double x) const;
    double evaluate(double x, double y) const;

    nlohmann::json to_json() const;

  private:
    std::vector<double> constants() const;

    std::string name_;
    std::vector<Variable> inputs_;
    std::string output_name_;
    std::vector<Consequent> consequents_;
    std::vector<Rule> rules_;
};

// Weighted average sum(w_i * c_i) / sum(w_i).
Defuzzified defuzzify(std::span<const double> activations, std::span<const double> constants);

// Hierarchical rule-base document. Layout:
//
//   { "name": "...",
//     "inputs": [ { "name": "...", "min": -1, "max": 1,
//                   "terms": [ { "label": "Z", "center": 0 }, ... ] } ],
//     "output": { "name": "...", "constants": { "Z": 0, ... } },
//     "rules": [ [ "Z", "Z", "Z" ], ... ] }
//
// A term may give "points" (3 or 4 breakpoints) instead of "center"; when
// every term of a variable gives "center" the 50%-overlap triangles are
// built. Each rule lists one antecedent label per input followed by the
// consequent label.
RuleBase rule_base_from_json(const nlohmann::json& doc);
RuleBase load_rule_base(const std::filesystem::path& path);

}  // namespace iesp::fuzzy
