#include "seqdiag/kb.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "seqdiag/reasoner.hpp"

namespace seqdiag {

KbSyntaxError::KbSyntaxError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column) {}

std::optional<std::size_t> KnowledgeBase::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < axioms.size(); ++i)
    if (axioms[i].id == id) return i;
  return std::nullopt;
}

std::set<std::string> KnowledgeBase::vocabulary() const {
  std::set<std::string> out;
  for (const auto& ax : axioms)
    for (const auto& f : ax.formulas) collect_atoms(f, out);
  for (const auto* list : {&background, &p_tests, &n_tests})
    for (const auto& f : *list) collect_atoms(f, out);
  return out;
}

namespace {

// Recursive descent over one line. Precedence low to high: ->, |, &, !.
class FormulaParser {
 public:
  FormulaParser(std::string_view text, std::size_t line, std::size_t column_base)
      : text_(text), line_(line), base_(column_base) {}

  Formula parse_all() {
    Formula f = parse_implies();
    skip_ws();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw KbSyntaxError(line_, base_ + pos_ + 1, what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept("->")) return Formula::implication(std::move(lhs), parse_implies());
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept("|")) parts.push_back(parse_and());
    return Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_not()};
    while (accept("&")) parts.push_back(parse_not());
    return Formula::conjunction(std::move(parts));
  }

  Formula parse_not() {
    if (accept("!")) return Formula::negation(parse_not());
    return parse_primary();
  }

  Formula parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of formula");
    if (accept("(")) {
      Formula inner = parse_implies();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    const std::size_t start = pos_;
    auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (!is_identifier(name)) {
      pos_ = start;
      fail(name.empty() ? "expected atom" : "invalid atom name '" + std::string(name) + "'");
    }
    return Formula::atom(std::string(name));
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s, std::size_t* leading = nullptr) {
  std::size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  std::size_t e = s.size();
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  if (leading) *leading = b;
  return s.substr(b, e - b);
}

enum class Section { None, Axioms, Background, P, N };

std::vector<std::pair<std::string, int>> parse_annotation(std::string_view body, std::size_t line,
                                                          std::size_t column) {
  std::vector<std::pair<std::string, int>> out;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    std::size_t comma = body.find(',', pos);
    if (comma == std::string_view::npos) comma = body.size();
    std::string_view item = trim(body.substr(pos, comma - pos));
    const std::size_t colon = item.find(':');
    if (colon == std::string_view::npos)
      throw KbSyntaxError(line, column + pos, "expected <name>:<count> in @elems annotation");
    std::string name(trim(item.substr(0, colon)));
    std::string count(trim(item.substr(colon + 1)));
    if (name.empty() || count.empty() ||
        count.find_first_not_of("0123456789") != std::string::npos)
      throw KbSyntaxError(line, column + pos, "malformed @elems entry '" + std::string(item) + "'");
    const int n = std::stoi(count);
    if (n <= 0) throw KbSyntaxError(line, column + pos, "element count must be positive");
    out.emplace_back(std::move(name), n);
    pos = comma + 1;
  }
  return out;
}

Axiom parse_axiom_line(std::string_view line, std::size_t lineno, std::size_t col0) {
  const std::size_t colon = line.find(':');
  // An annotation contains ':' itself, so locate the separator after it.
  std::size_t sep = colon;
  std::string_view head;
  std::vector<std::pair<std::string, int>> annotation;
  const std::size_t at = line.find('@');
  if (at != std::string_view::npos && (colon == std::string_view::npos || at < colon)) {
    if (line.substr(at, 7) != "@elems=")
      throw KbSyntaxError(lineno, col0 + at + 1, "unknown annotation (expected @elems=)");
    std::size_t end = at + 7;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    annotation = parse_annotation(line.substr(at + 7, end - at - 7), lineno, col0 + at + 8);
    head = line.substr(0, at);
    sep = line.find(':', end);
    if (sep == std::string_view::npos || !trim(line.substr(end, sep - end)).empty())
      throw KbSyntaxError(lineno, col0 + end + 1, "expected ':' after annotation");
  } else {
    if (colon == std::string_view::npos)
      throw KbSyntaxError(lineno, col0 + 1, "expected '<id> : <formula>'");
    head = line.substr(0, colon);
  }
  std::string id(trim(head));
  if (!is_identifier(id)) throw KbSyntaxError(lineno, col0 + 1, "invalid axiom id '" + id + "'");

  Axiom ax;
  ax.id = std::move(id);
  std::size_t pos = sep + 1;
  while (true) {
    std::size_t semi = line.find(';', pos);
    if (semi == std::string_view::npos) semi = line.size();
    std::string_view part = line.substr(pos, semi - pos);
    if (trim(part).empty()) throw KbSyntaxError(lineno, col0 + pos + 1, "empty formula");
    ax.formulas.push_back(FormulaParser(part, lineno, col0 + pos).parse_all());
    if (semi == line.size()) break;
    pos = semi + 1;
  }
  if (!annotation.empty()) {
    ax.annotation = annotation;
    for (const auto& [name, count] : annotation) ax.elements[name] += count;
  } else {
    ax.elements = extract_elements(ax.formulas);
  }
  return ax;
}

}  // namespace

Formula parse_formula(std::string_view text) {
  if (trim(text).empty()) throw KbSyntaxError(1, 1, "empty formula");
  return FormulaParser(text, 1, 0).parse_all();
}

KnowledgeBase parse_kb_unchecked(std::string_view text) {
  KnowledgeBase kb;
  Section section = Section::None;
  int last_order = 0;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (const std::size_t hash = raw.find('#'); hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    std::size_t lead = 0;
    std::string_view line = trim(raw, &lead);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      static const std::pair<std::string_view, Section> headers[] = {
          {"[axioms]", Section::Axioms},
          {"[background]", Section::Background},
          {"[P]", Section::P},
          {"[N]", Section::N}};
      Section next = Section::None;
      int order = 0;
      for (int i = 0; i < 4; ++i)
        if (line == headers[i].first) {
          next = headers[i].second;
          order = i + 1;
        }
      if (next == Section::None)
        throw KbSyntaxError(lineno, lead + 1, "unknown section '" + std::string(line) + "'");
      if (order <= last_order)
        throw KbSyntaxError(lineno, lead + 1, "section '" + std::string(line) + "' out of order");
      if (order != 1 && last_order == 0)
        throw KbSyntaxError(lineno, lead + 1, "the first section must be [axioms]");
      last_order = order;
      section = next;
    } else {
      switch (section) {
        case Section::None:
          throw KbSyntaxError(lineno, lead + 1, "content before the [axioms] section");
        case Section::Axioms: {
          Axiom ax = parse_axiom_line(line, lineno, lead);
          if (kb.index_of(ax.id))
            throw KbValidationError("duplicate axiom id '" + ax.id + "' at line " +
                                    std::to_string(lineno));
          kb.axioms.push_back(std::move(ax));
          break;
        }
        case Section::Background:
          kb.background.push_back(FormulaParser(line, lineno, lead).parse_all());
          break;
        case Section::P:
          kb.p_tests.push_back(FormulaParser(line, lineno, lead).parse_all());
          break;
        case Section::N:
          kb.n_tests.push_back(FormulaParser(line, lineno, lead).parse_all());
          break;
      }
    }
    if (nl == text.size()) break;
  }
  if (last_order == 0) throw KbSyntaxError(1, 1, "missing [axioms] section");
  return kb;
}

void check_admissible(const KnowledgeBase& kb) {
  SentenceSet base{kb.background, {}};
  base.formulas.insert(base.formulas.end(), kb.p_tests.begin(), kb.p_tests.end());
  if (!is_consistent(base))
    throw KbUnsatisfiableError("background together with P is inconsistent");
  for (const auto& n : kb.n_tests)
    if (entails(base, n))
      throw KbUnsatisfiableError("background together with P entails N sentence '" +
                                 to_string(n) + "'");
}

KnowledgeBase parse_kb(std::string_view text) {
  KnowledgeBase kb = parse_kb_unchecked(text);
  check_admissible(kb);
  return kb;
}

std::string format_annotation(const std::vector<std::pair<std::string, int>>& annotation) {
  std::string out;
  for (std::size_t i = 0; i < annotation.size(); ++i) {
    if (i) out += ',';
    out += annotation[i].first + ':' + std::to_string(annotation[i].second);
  }
  return out;
}

std::string serialize_kb(const KnowledgeBase& kb) {
  std::ostringstream out;
  out << "[axioms]\n";
  for (const auto& ax : kb.axioms) {
    out << ax.id;
    if (ax.overridden()) out << " @elems=" << format_annotation(ax.annotation);
    out << " : ";
    for (std::size_t i = 0; i < ax.formulas.size(); ++i) {
      if (i) out << " ; ";
      out << to_string(ax.formulas[i]);
    }
    out << '\n';
  }
  auto section = [&](const char* header, const std::vector<Formula>& fs) {
    out << '\n' << header << '\n';
    for (const auto& f : fs) out << to_string(f) << '\n';
  };
  section("[background]", kb.background);
  section("[P]", kb.p_tests);
  section("[N]", kb.n_tests);
  return out.str();
}

KnowledgeBase load_kb_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_kb(buf.str());
}

}  // namespace seqdiag
