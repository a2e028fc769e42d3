#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace seqdiag {

enum class Connective { Atom, Not, And, Or, Implies };

/// Immutable propositional formula. Nodes are shared, so copies are cheap.
class Formula {
 public:
  static Formula atom(std::string name);
  static Formula negation(Formula child);
  /// A single child is returned unchanged; and/or nodes always hold >= 2 children.
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implication(Formula lhs, Formula rhs);

  Connective kind() const { return node_->kind; }
  bool is_atom() const { return node_->kind == Connective::Atom; }
  const std::string& name() const { return node_->name; }
  const std::vector<Formula>& children() const { return node_->children; }

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node {
    Connective kind;
    std::string name;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

bool is_identifier(std::string_view s);

/// Renders in the KB file syntax with minimal parentheses.
std::string to_string(const Formula& f);

/// Canonical key for a set of sentences: sorted renderings joined by "; ".
std::string fingerprint(const std::vector<Formula>& sentences);

void collect_atoms(const Formula& f, std::set<std::string>& out);
std::set<std::string> atoms_of(const std::vector<Formula>& fs);

bool evaluate(const Formula& f, const std::function<bool(const std::string&)>& value);

/// Syntax-element multiset. Keys are element names (impl, and, or, not, exists, ...).
using ElementCounts = std::map<std::string, int>;

/// One element per connective occurrence; an n-ary and/or contributes n-1.
ElementCounts extract_elements(const Formula& f);
ElementCounts extract_elements(const std::vector<Formula>& fs);

}  // namespace seqdiag
