#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <unordered_map>

#include "ctsp/lp.hpp"

namespace ctsp::lp {

namespace {

std::string var_name(const LinearProgram& lp, int j) {
  if (j < static_cast<int>(lp.names.size()) && !lp.names[j].empty()) return lp.names[j];
  return "x" + std::to_string(j);
}

void write_number(std::ostream& os, double v) {
  if (v == kInf) {
    os << "inf";
  } else if (v == -kInf) {
    os << "-inf";
  } else {
    os << v;
  }
}

void write_terms(std::ostream& os, const LinearProgram& lp,
                 const std::vector<std::pair<int, double>>& terms) {
  if (terms.empty()) {
    os << " 0 " << var_name(lp, 0);
    return;
  }
  for (auto [j, a] : terms) {
    os << (a < 0 ? " - " : " + ");
    if (std::abs(a) != 1.0) os << std::abs(a) << ' ';
    os << var_name(lp, j);
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  const std::string t = lower(tok);
  if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") {
    out = kInf;
    return true;
  }
  if (t == "-inf" || t == "-infinity") {
    out = -kInf;
    return true;
  }
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end != tok.c_str() && *end == '\0';
}

bool is_relation(const std::string& t) {
  return t == "<=" || t == ">=" || t == "=" || t == "=<" || t == "=>" || t == "<" || t == ">";
}

Relation to_relation(const std::string& t) {
  if (t == "<=" || t == "=<" || t == "<") return Relation::LessEqual;
  if (t == ">=" || t == "=>" || t == ">") return Relation::GreaterEqual;
  return Relation::Equal;
}

enum class Section { None, Objective, Constraints, Bounds, Binaries, End };

struct Reader {
  std::vector<std::string> toks;
  std::size_t pos = 0;
  LinearProgram lp;
  std::unordered_map<std::string, int> index;

  bool done() const { return pos >= toks.size(); }
  const std::string& peek() const { return toks[pos]; }

  int var(const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const int j = lp.add_variable(0.0, 0.0, kInf, name);
    index.emplace(name, j);
    return j;
  }

  // Section keyword at the cursor, consuming it.
  std::optional<Section> keyword() {
    if (done()) return Section::End;
    const std::string t = lower(peek());
    if (t == "minimize" || t == "minimise" || t == "min") {
      lp.sense = Sense::Minimize;
      ++pos;
      return Section::Objective;
    }
    if (t == "maximize" || t == "maximise" || t == "max") {
      lp.sense = Sense::Maximize;
      ++pos;
      return Section::Objective;
    }
    if (t == "subject" && pos + 1 < toks.size() && lower(toks[pos + 1]) == "to") {
      pos += 2;
      return Section::Constraints;
    }
    if (t == "st" || t == "s.t." || t == "such") {
      ++pos;
      if (t == "such" && !done()) ++pos;
      return Section::Constraints;
    }
    if (t == "bounds" || t == "bound") {
      ++pos;
      return Section::Bounds;
    }
    if (t == "binaries" || t == "binary" || t == "bin") {
      ++pos;
      return Section::Binaries;
    }
    if (t == "end") {
      ++pos;
      return Section::End;
    }
    return std::nullopt;
  }

  bool at_keyword() {
    const std::size_t save = pos;
    const Sense sense = lp.sense;
    const bool k = keyword().has_value();
    pos = save;
    lp.sense = sense;
    return k;
  }

  // Linear expression up to a relation or the next section.
  std::vector<std::pair<int, double>> expression() {
    std::vector<std::pair<int, double>> terms;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    while (!done() && !is_relation(peek()) && !at_keyword()) {
      const std::string t = toks[pos++];
      double v;
      if (t == "+") continue;
      if (t == "-") {
        sign = -sign;
        continue;
      }
      if (parse_number(t, v)) {
        coef = have_coef ? coef * v : v;
        have_coef = true;
        continue;
      }
      terms.emplace_back(var(t), sign * coef);
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
    }
    if (have_coef && !terms.empty()) throw Error("lp format: dangling constant in expression");
    return terms;
  }

  std::string label() {
    if (!done() && peek().size() > 1 && peek().back() == ':') {
      std::string name = peek().substr(0, peek().size() - 1);
      ++pos;
      return name;
    }
    return {};
  }

  double number() {
    if (done()) throw Error("lp format: expected a number");
    std::string t = toks[pos++];
    double sign = 1.0;
    if ((t == "-" || t == "+") && !done()) {
      if (t == "-") sign = -1.0;
      t = toks[pos++];
    }
    double v;
    if (!parse_number(t, v)) throw Error("lp format: expected a number, got '" + t + "'");
    return sign * v;
  }

  void objective() {
    label();
    for (auto [j, a] : expression()) lp.objective[j] += a;
  }

  void constraint() {
    std::string name = label();
    auto terms = expression();
    if (done() || !is_relation(peek())) throw Error("lp format: constraint without relation");
    const Relation rel = to_relation(toks[pos++]);
    const double rhs = number();
    lp.add_row(std::move(terms), rel, rhs, std::move(name));
  }

  void bound() {
    double v;
    if (parse_number(peek(), v) || peek() == "-" || peek() == "+") {
      const double lo = number();
      if (done() || !is_relation(peek())) throw Error("lp format: malformed bound");
      const Relation r1 = to_relation(toks[pos++]);
      const int j = var(toks[pos++]);
      apply(j, r1 == Relation::LessEqual ? Relation::GreaterEqual
               : r1 == Relation::GreaterEqual ? Relation::LessEqual
                                              : Relation::Equal,
            lo);
      if (!done() && is_relation(peek())) {
        const Relation r2 = to_relation(toks[pos++]);
        apply(j, r2, number());
      }
      return;
    }
    const int j = var(toks[pos++]);
    if (!done() && lower(peek()) == "free") {
      ++pos;
      lp.lower[j] = -kInf;
      lp.upper[j] = kInf;
      return;
    }
    if (done() || !is_relation(peek())) throw Error("lp format: malformed bound");
    const Relation r = to_relation(toks[pos++]);
    apply(j, r, number());
  }

  void apply(int j, Relation r, double v) {
    if (r == Relation::LessEqual) lp.upper[j] = v;
    if (r == Relation::GreaterEqual) lp.lower[j] = v;
    if (r == Relation::Equal) lp.lower[j] = lp.upper[j] = v;
  }
};

}  // namespace

void write_lp_format(const LinearProgram& lp, std::ostream& os, const std::vector<int>& binaries) {
  lp.validate();
  os.precision(17);
  os << (lp.sense == Sense::Minimize ? "Minimize" : "Maximize") << "\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0.0) obj.emplace_back(j, lp.objective[j]);
  if (lp.num_vars() > 0) write_terms(os, lp, obj);
  os << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const Row& r = lp.rows[i];
    os << ' ' << (r.name.empty() ? "c" + std::to_string(i) : r.name) << ':';
    write_terms(os, lp, r.coeffs);
    os << (r.relation == Relation::LessEqual   ? " <= "
           : r.relation == Relation::GreaterEqual ? " >= "
                                                  : " = ");
    write_number(os, r.rhs);
    os << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    if (lo == -kInf && hi == kInf) {
      os << ' ' << var_name(lp, j) << " free\n";
    } else {
      os << ' ';
      write_number(os, lo);
      os << " <= " << var_name(lp, j) << " <= ";
      write_number(os, hi);
      os << '\n';
    }
  }
  if (!binaries.empty()) {
    os << "Binaries\n";
    for (int j : binaries) os << ' ' << var_name(lp, j) << '\n';
  }
  os << "End\n";
}

LinearProgram read_lp_format(std::istream& is, std::vector<int>* binaries) {
  Reader rd;
  std::string tok;
  while (is >> tok) rd.toks.push_back(tok);
  Section sec = Section::None;
  std::vector<int> bins;
  while (!rd.done() && sec != Section::End) {
    if (auto k = rd.keyword()) {
      sec = *k;
      continue;
    }
    switch (sec) {
      case Section::Objective: rd.objective(); break;
      case Section::Constraints: rd.constraint(); break;
      case Section::Bounds: rd.bound(); break;
      case Section::Binaries: {
        const int j = rd.var(rd.toks[rd.pos++]);
        rd.lp.lower[j] = std::max(rd.lp.lower[j], 0.0);
        rd.lp.upper[j] = std::min(rd.lp.upper[j], 1.0);
        bins.push_back(j);
        break;
      }
      default: throw Error("lp format: content outside of any section");
    }
  }
  if (binaries) *binaries = std::move(bins);
  rd.lp.validate();
  return std::move(rd.lp);
}

}  // namespace ctsp::lp
