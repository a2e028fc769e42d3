#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqdiag/formula.hpp"

namespace seqdiag {

/// A removable unit of the knowledge base. Its formulas are read conjunctively.
struct Axiom {
  std::string id;
  std::vector<Formula> formulas;
  /// Element multiset used for fault probabilities.
  ElementCounts elements;
  /// `@elems=` annotation in source order, when the multiset was overridden.
  std::vector<std::pair<std::string, int>> annotation;

  bool overridden() const { return !annotation.empty(); }
  friend bool operator==(const Axiom&, const Axiom&) = default;
};

/// The tuple <O, B, P, N>.
struct KnowledgeBase {
  std::vector<Axiom> axioms;
  std::vector<Formula> background;
  std::vector<Formula> p_tests;
  std::vector<Formula> n_tests;

  std::optional<std::size_t> index_of(std::string_view id) const;
  std::set<std::string> vocabulary() const;
  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

class KbSyntaxError : public std::runtime_error {
 public:
  KbSyntaxError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Structurally well formed but semantically invalid (duplicate ids, bad annotation).
class KbValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// B together with P is inconsistent or entails a member of N; no diagnosis can exist.
class KbUnsatisfiableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses a single formula. Column offsets in errors are 1-based.
Formula parse_formula(std::string_view text);

/// Parses a KB file and checks that a diagnosis can exist for it.
KnowledgeBase parse_kb(std::string_view text);

/// Syntax and id checks only; no reasoning.
KnowledgeBase parse_kb_unchecked(std::string_view text);

std::string serialize_kb(const KnowledgeBase& kb);

KnowledgeBase load_kb_file(const std::string& path);

std::string format_annotation(const std::vector<std::pair<std::string, int>>& annotation);

/// Throws KbUnsatisfiableError when B and P admit no diagnosis.
void check_admissible(const KnowledgeBase& kb);

}  // namespace seqdiag
