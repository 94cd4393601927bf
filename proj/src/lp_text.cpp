#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "crew/milp.hpp"

namespace crew {
namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_terms(std::ostringstream& os, const IpInstance& ip, const std::vector<Term>& terms) {
  int on_line = 0;
  for (const Term& t : terms) {
    if (on_line == 8) {
      os << "\n   ";
      on_line = 0;
    }
    os << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef)) << ' '
       << ip.var_name(t.var);
    ++on_line;
  }
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool is_relation(const std::string& tok) {
  return tok == "<=" || tok == "=<" || tok == "<" || tok == ">=" || tok == "=>" ||
         tok == ">" || tok == "=";
}

Relation to_relation(const std::string& tok) {
  if (tok == "=") return Relation::kEqual;
  if (tok[0] == '<' || tok == "=<") return Relation::kLessEqual;
  return Relation::kGreaterEqual;
}

struct RawRow {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
};

enum class Section { kNone, kObjective, kConstraints, kBinaries, kEnd };

}  // namespace

std::string export_lp_text(const IpInstance& ip) {
  check_ip(ip);
  std::ostringstream os;
  os << "\\ 0/1 program: " << ip.num_vars << " variables, " << ip.constraints.size()
     << " constraints\n";
  os << (ip.sense == Sense::kMaximize ? "Maximize\n" : "Minimize\n");
  os << " obj:";
  write_terms(os, ip, ip.objective);
  os << "\nSubject To\n";
  for (size_t i = 0; i < ip.constraints.size(); ++i) {
    const auto& c = ip.constraints[i];
    os << ' ' << (c.name.empty() ? "c" + std::to_string(i) : c.name) << ':';
    write_terms(os, ip, c.terms);
    const char* rel = c.relation == Relation::kLessEqual ? "<="
                      : c.relation == Relation::kEqual   ? "="
                                                         : ">=";
    os << ' ' << rel << ' ' << format_number(c.rhs) << '\n';
  }
  os << "Binaries\n";
  for (int v = 0; v < ip.num_vars; ++v) {
    os << " " << ip.var_name(v);
    if (v % 8 == 7 || v + 1 == ip.num_vars) os << '\n';
  }
  os << "End\n";
  return os.str();
}

IpInstance parse_lp_text(const std::string& text) {
  std::istringstream lines(text);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(lines, line)) {
    const auto cut = line.find('\\');
    if (cut != std::string::npos) line.resize(cut);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }

  IpInstance ip;
  Section section = Section::kNone;
  bool have_sense = false;
  std::vector<std::pair<std::string, double>> objective;
  std::vector<RawRow> rows;
  std::vector<std::string> binaries;

  RawRow current;
  bool in_row = false;
  double sign = 1.0;
  double coef = 1.0;
  bool have_coef = false;
  bool expect_rhs = false;

  auto flush_term = [&](std::vector<std::pair<std::string, double>>& into,
                        const std::string& name) {
    into.emplace_back(name, sign * coef);
    sign = 1.0;
    coef = 1.0;
    have_coef = false;
  };

  for (size_t k = 0; k < tokens.size(); ++k) {
    const std::string& tok = tokens[k];
    const std::string low = lower(tok);
    if (low == "maximize" || low == "maximise" || low == "max" || low == "minimize" ||
        low == "minimise" || low == "min") {
      if (section != Section::kNone) throw LpParseError("objective sense after objective");
      ip.sense = low.rfind("max", 0) == 0 ? Sense::kMaximize : Sense::kMinimize;
      have_sense = true;
      section = Section::kObjective;
      continue;
    }
    if (low == "subject" && k + 1 < tokens.size() && lower(tokens[k + 1]) == "to") {
      ++k;
      section = Section::kConstraints;
      continue;
    }
    if (low == "st" || low == "s.t." || low == "such") {
      if (low == "such") ++k;
      section = Section::kConstraints;
      continue;
    }
    if (low == "binaries" || low == "binary" || low == "bin") {
      if (in_row) throw LpParseError("unterminated constraint row");
      section = Section::kBinaries;
      continue;
    }
    if (low == "end") {
      section = Section::kEnd;
      continue;
    }

    switch (section) {
      case Section::kNone:
      case Section::kEnd:
        throw LpParseError("unexpected token '" + tok + "'");
      case Section::kObjective: {
        if (tok.back() == ':') continue;  // objective label
        if (tok == "+" || tok == "-") {
          sign = tok == "-" ? -sign : sign;
          continue;
        }
        double num;
        if (parse_number(tok, num)) {
          coef = num;
          have_coef = true;
          continue;
        }
        flush_term(objective, tok);
        break;
      }
      case Section::kConstraints: {
        if (expect_rhs) {
          double num;
          double rsign = 1.0;
          std::string t = tok;
          if (t == "-" || t == "+") {
            rsign = t == "-" ? -1.0 : 1.0;
            if (++k >= tokens.size()) throw LpParseError("missing rhs");
            t = tokens[k];
          }
          if (!parse_number(t, num)) throw LpParseError("bad rhs '" + t + "'");
          current.rhs = rsign * num;
          rows.push_back(std::move(current));
          current = RawRow{};
          in_row = false;
          expect_rhs = false;
          continue;
        }
        if (!in_row) {
          in_row = true;
          if (tok.back() == ':') {
            current.name = tok.substr(0, tok.size() - 1);
            continue;
          }
        }
        if (is_relation(tok)) {
          if (have_coef) throw LpParseError("dangling coefficient before relation");
          current.relation = to_relation(tok);
          expect_rhs = true;
          continue;
        }
        if (tok == "+" || tok == "-") {
          sign = tok == "-" ? -sign : sign;
          continue;
        }
        double num;
        if (parse_number(tok, num)) {
          coef = num;
          have_coef = true;
          continue;
        }
        flush_term(current.terms, tok);
        break;
      }
      case Section::kBinaries:
        binaries.push_back(tok);
        break;
    }
  }
  if (!have_sense) throw LpParseError("missing objective section");
  if (in_row || expect_rhs) throw LpParseError("unterminated constraint row");
  if (section != Section::kEnd) throw LpParseError("missing End");

  std::unordered_map<std::string, int> index;
  for (const std::string& name : binaries) {
    if (!index.emplace(name, static_cast<int>(index.size())).second) {
      throw LpParseError("duplicate binary '" + name + "'");
    }
  }
  ip.num_vars = static_cast<int>(binaries.size());
  bool synthetic = true;
  for (int v = 0; v < ip.num_vars; ++v) {
    if (binaries[v] != "x" + std::to_string(v)) synthetic = false;
  }
  if (!synthetic) ip.var_names = binaries;

  auto resolve = [&](const std::vector<std::pair<std::string, double>>& raw) {
    std::vector<Term> out;
    for (const auto& [name, c] : raw) {
      auto it = index.find(name);
      if (it == index.end()) throw LpParseError("variable '" + name + "' not declared binary");
      out.push_back({it->second, c});
    }
    return out;
  };
  ip.objective = resolve(objective);
  for (size_t i = 0; i < rows.size(); ++i) {
    std::string name = rows[i].name == "c" + std::to_string(i) ? std::string() : rows[i].name;
    ip.add_constraint(resolve(rows[i].terms), rows[i].relation, rows[i].rhs, std::move(name));
  }
  check_ip(ip);
  return ip;
}

}  // namespace crew
