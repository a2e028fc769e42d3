#include "seqdiag/formula.hpp"

#include <algorithm>
#include <stdexcept>

namespace seqdiag {

Formula Formula::atom(std::string name) {
  if (!is_identifier(name)) throw std::invalid_argument("invalid atom name '" + name + "'");
  return Formula(std::make_shared<const Node>(Node{Connective::Atom, std::move(name), {}}));
}

Formula Formula::negation(Formula child) {
  return Formula(std::make_shared<const Node>(Node{Connective::Not, {}, {std::move(child)}}));
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.empty()) throw std::invalid_argument("empty conjunction");
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(Node{Connective::And, {}, std::move(children)}));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.empty()) throw std::invalid_argument("empty disjunction");
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(Node{Connective::Or, {}, std::move(children)}));
}

Formula Formula::implication(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Connective::Implies, {}, {std::move(lhs), std::move(rhs)}}));
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->kind == b.node_->kind && a.node_->name == b.node_->name &&
         a.node_->children == b.node_->children;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!head(s.front())) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [&](char c) { return head(c) || (c >= '0' && c <= '9'); });
}

namespace {

// Binding strength; higher binds tighter.
int precedence(Connective c) {
  switch (c) {
    case Connective::Implies: return 1;
    case Connective::Or: return 2;
    case Connective::And: return 3;
    case Connective::Not: return 4;
    case Connective::Atom: return 5;
  }
  return 0;
}

void render(const Formula& f, std::string& out) {
  auto child = [&](const Formula& c, int min_prec) {
    if (precedence(c.kind()) < min_prec) {
      out += '(';
      render(c, out);
      out += ')';
    } else {
      render(c, out);
    }
  };
  switch (f.kind()) {
    case Connective::Atom:
      out += f.name();
      break;
    case Connective::Not:
      out += '!';
      child(f.children()[0], precedence(Connective::Not));
      break;
    case Connective::And:
    case Connective::Or: {
      const char* sep = f.kind() == Connective::And ? " & " : " | ";
      // Nested same-kind children are parenthesised so the tree shape survives a round trip.
      const int min_prec = precedence(f.kind()) + 1;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        child(f.children()[i], min_prec);
      }
      break;
    }
    case Connective::Implies:
      // Right-associative: a -> (b -> c) prints as a -> b -> c.
      child(f.children()[0], precedence(Connective::Implies) + 1);
      out += " -> ";
      child(f.children()[1], precedence(Connective::Implies));
      break;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  render(f, out);
  return out;
}

std::string fingerprint(const std::vector<Formula>& sentences) {
  std::vector<std::string> parts;
  parts.reserve(sentences.size());
  for (const auto& s : sentences) parts.push_back(to_string(s));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  return out;
}

void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.is_atom()) {
    out.insert(f.name());
    return;
  }
  for (const auto& c : f.children()) collect_atoms(c, out);
}

std::set<std::string> atoms_of(const std::vector<Formula>& fs) {
  std::set<std::string> out;
  for (const auto& f : fs) collect_atoms(f, out);
  return out;
}

bool evaluate(const Formula& f, const std::function<bool(const std::string&)>& value) {
  switch (f.kind()) {
    case Connective::Atom: return value(f.name());
    case Connective::Not: return !evaluate(f.children()[0], value);
    case Connective::And:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, value); });
    case Connective::Or:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, value); });
    case Connective::Implies:
      return !evaluate(f.children()[0], value) || evaluate(f.children()[1], value);
  }
  return false;
}

namespace {
void count_elements(const Formula& f, ElementCounts& out) {
  switch (f.kind()) {
    case Connective::Atom: return;
    case Connective::Not: out["not"] += 1; break;
    case Connective::And: out["and"] += static_cast<int>(f.children().size()) - 1; break;
    case Connective::Or: out["or"] += static_cast<int>(f.children().size()) - 1; break;
    case Connective::Implies: out["impl"] += 1; break;
  }
  for (const auto& c : f.children()) count_elements(c, out);
}
}  // namespace

ElementCounts extract_elements(const Formula& f) {
  ElementCounts out;
  count_elements(f, out);
  return out;
}

ElementCounts extract_elements(const std::vector<Formula>& fs) {
  ElementCounts out;
  for (const auto& f : fs) count_elements(f, out);
  return out;
}

}  // namespace seqdiag
