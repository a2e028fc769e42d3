#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seqdiag/formula.hpp"

namespace seqdiag {

enum class Answer { Yes, No, Unknown };

/// Where a diagnosis lands for a query: predicts yes, predicts no, or no prediction.
enum class Side { Plus, Minus, Zero };

/// <Q, D+, D-, D0>. The sets hold indices into the leading-diagnosis list the partition was
/// built for. The all-empty value means "no query".
struct Partition {
  std::vector<Formula> query;
  std::vector<std::size_t> dx;
  std::vector<std::size_t> dnx;
  std::vector<std::size_t> dz;

  bool empty() const { return query.empty() && dx.empty() && dnx.empty() && dz.empty(); }
  std::size_t size() const { return dx.size() + dnx.size() + dz.size(); }

  /// Side of each leading diagnosis, indexed like the leading list.
  std::vector<Side> sides() const {
    std::vector<Side> out(size(), Side::Zero);
    for (auto i : dx) out.at(i) = Side::Plus;
    for (auto i : dnx) out.at(i) = Side::Minus;
    return out;
  }

  /// Identifies the D+/D-/D0 split, independent of the query.
  std::string key() const {
    std::string k(size(), '0');
    for (auto i : dx) k[i] = '+';
    for (auto i : dnx) k[i] = '-';
    return k;
  }

  static Partition from_sides(std::vector<Formula> query, const std::vector<Side>& sides) {
    Partition p;
    p.query = std::move(query);
    for (std::size_t i = 0; i < sides.size(); ++i) {
      if (sides[i] == Side::Plus) p.dx.push_back(i);
      else if (sides[i] == Side::Minus) p.dnx.push_back(i);
      else p.dz.push_back(i);
    }
    return p;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
};

inline const char* to_string(Answer a) {
  switch (a) {
    case Answer::Yes: return "yes";
    case Answer::No: return "no";
    case Answer::Unknown: return "unknown";
  }
  return "?";
}

}  // namespace seqdiag
