#include "cisjac/system.hpp"

#include <cctype>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace cisjac {

namespace {

void collect_kinds(const Expr& e, bool kind_seen[8]) {
  switch (e.tag()) {
    case Expr::Tag::constant:
    case Expr::Tag::parameter:
      return;
    case Expr::Tag::coordinate:
      kind_seen[static_cast<std::size_t>(e.coord().kind)] = true;
      return;
    case Expr::Tag::unary:
      collect_kinds(e.lhs(), kind_seen);
      return;
    case Expr::Tag::binary:
      collect_kinds(e.lhs(), kind_seen);
      collect_kinds(e.rhs(), kind_seen);
      return;
  }
}

void check_chart_kinds(const Expr& e, Chart chart, const char* label) {
  bool seen[8] = {};
  collect_kinds(e, seen);
  const auto used = [&seen](CoordKind k) { return seen[static_cast<std::size_t>(k)]; };
  const bool ok = chart == Chart::darboux
                      ? !(used(CoordKind::z) || used(CoordKind::I) || used(CoordKind::dz) ||
                          used(CoordKind::dI))
                      : !(used(CoordKind::q) || used(CoordKind::p) || used(CoordKind::dq) ||
                          used(CoordKind::dp));
  if (!ok)
    throw std::invalid_argument(std::string(label) + " uses coordinates outside the system chart");
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

bool looks_like_coordinate(const std::string& name) {
  static constexpr const char* prefixes[] = {"dq", "dp", "dz", "dI", "q", "p", "z", "I"};
  for (const char* prefix : prefixes) {
    const std::string_view pv(prefix);
    if (name.size() <= pv.size() || name.compare(0, pv.size(), pv) != 0) continue;
    bool digits = true;
    for (std::size_t i = pv.size(); i < name.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
        digits = false;
        break;
      }
    if (digits) return true;
  }
  return false;
}

}  // namespace

void SystemDef::validate() const {
  if (m == 0) throw std::invalid_argument("system dimension m must be >= 1");
  if (F.size() != m)
    throw std::invalid_argument("system must define exactly m first integrals");
  const auto base_kinds = chart == Chart::darboux
                              ? std::initializer_list<CoordKind>{CoordKind::q, CoordKind::p}
                              : std::initializer_list<CoordKind>{CoordKind::z, CoordKind::I};
  check_chart_kinds(H, chart, "H");
  if (H.max_index(base_kinds) > m)
    throw std::invalid_argument("H references a coordinate index above m");
  for (std::size_t k = 0; k < F.size(); ++k) {
    const std::string label = "F" + std::to_string(k + 1);
    check_chart_kinds(F[k], chart, label.c_str());
    if (F[k].max_index(base_kinds) > m)
      throw std::invalid_argument(label + " references a coordinate index above m");
  }
}

std::uint64_t SystemDef::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  h = fnv1a(h, "m=" + std::to_string(m));
  h = fnv1a(h, chart == Chart::darboux ? ";chart=darboux" : ";chart=action_angle");
  h = fnv1a(h, separable ? ";sep=1" : ";sep=0");
  h = fnv1a(h, ";H=" + to_string(H));
  for (std::size_t k = 0; k < F.size(); ++k)
    h = fnv1a(h, ";F" + std::to_string(k + 1) + "=" + to_string(F[k]));
  for (const auto& [name, value] : params)
    h = fnv1a(h, ";param " + name + "=" + format_double(value));
  return h;
}

SystemDef parse_system(std::string_view source) {
  struct PendingExpr {
    std::size_t line = 0;
    std::size_t column = 0;  // column where the expression text begins
    std::string text;
  };

  std::optional<std::size_t> dim;
  std::optional<bool> separable;
  ParamMap params;
  std::optional<PendingExpr> h_line;
  std::map<std::size_t, PendingExpr> f_lines;

  std::istringstream in{std::string(source)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::size_t hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);

    std::size_t i = 0;
    const auto skip_ws = [&] {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    };
    const auto word = [&]() -> std::string {
      skip_ws();
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      return line.substr(start, i - start);
    };

    skip_ws();
    if (i >= line.size()) continue;
    const std::size_t key_col = i + 1;
    const std::string key = word();

    if (key == "dim") {
      if (dim) throw ParseError(lineno, key_col, "duplicate dim directive", key);
      const std::string v = word();
      char* end = nullptr;
      const long n = std::strtol(v.c_str(), &end, 10);
      if (v.empty() || end == nullptr || *end != '\0' || n < 1)
        throw ParseError(lineno, key_col, "dim expects a positive integer", v);
      dim = static_cast<std::size_t>(n);
    } else if (key == "param") {
      const std::string name = word();
      const std::string v = word();
      if (name.empty() || v.empty())
        throw ParseError(lineno, key_col, "param expects a name and a value", key);
      if (name == "pi" || name == "e" || looks_like_coordinate(name))
        throw ParseError(lineno, key_col, "param name collides with a reserved symbol", name);
      if (params.count(name) != 0)
        throw ParseError(lineno, key_col, "duplicate param", name);
      char* end = nullptr;
      const double value = std::strtod(v.c_str(), &end);
      if (end == nullptr || *end != '\0')
        throw ParseError(lineno, key_col, "param value is not a number", v);
      params.emplace(name, value);
    } else if (key == "separable") {
      if (separable) throw ParseError(lineno, key_col, "duplicate separable directive", key);
      const std::string v = word();
      if (v == "true")
        separable = true;
      else if (v == "false")
        separable = false;
      else
        throw ParseError(lineno, key_col, "separable expects true or false", v);
    } else if (key == "H") {
      if (h_line) throw ParseError(lineno, key_col, "duplicate H directive", key);
      skip_ws();
      h_line = PendingExpr{lineno, i + 1, line.substr(i)};
    } else if (key.size() >= 2 && key[0] == 'F') {
      std::uint64_t k = 0;
      bool digits = true;
      for (std::size_t j = 1; j < key.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(key[j]))) {
          digits = false;
          break;
        }
        k = k * 10 + static_cast<std::uint64_t>(key[j] - '0');
      }
      if (!digits || k == 0)
        throw ParseError(lineno, key_col, "unknown directive", key);
      if (f_lines.count(k) != 0)
        throw ParseError(lineno, key_col, "duplicate integral directive", key);
      skip_ws();
      f_lines.emplace(k, PendingExpr{lineno, i + 1, line.substr(i)});
    } else {
      throw ParseError(lineno, key_col, "unknown directive", key);
    }
  }

  if (!dim) throw ParseError(lineno == 0 ? 1 : lineno, 1, "missing dim directive", "");
  if (!h_line) throw ParseError(lineno == 0 ? 1 : lineno, 1, "missing H directive", "");
  const std::size_t m = *dim;
  for (const auto& [k, pending] : f_lines)
    if (k > m)
      throw ParseError(pending.line, pending.column,
                       "integral index exceeds dimension m=" + std::to_string(m),
                       "F" + std::to_string(k));
  for (std::size_t k = 1; k <= m; ++k)
    if (f_lines.count(k) == 0)
      throw ParseError(lineno == 0 ? 1 : lineno, 1, "missing integral F" + std::to_string(k), "");

  const auto parse_at = [&](const PendingExpr& pe, const std::string& label) -> Expr {
    if (pe.text.empty()) throw ParseError(pe.line, pe.column, label + " is empty", "");
    Expr e;
    try {
      e = parse_expr(pe.text, m, params);
    } catch (const ParseError& err) {
      // Rebase the sub-parser position onto the file.
      const std::size_t column =
          err.line() == 1 ? pe.column + err.column() - 1 : err.column();
      throw ParseError(pe.line + err.line() - 1, column, err.message(), err.token());
    }
    if (e.references_kind(CoordKind::dq) || e.references_kind(CoordKind::dp) ||
        e.references_kind(CoordKind::z) || e.references_kind(CoordKind::I) ||
        e.references_kind(CoordKind::dz) || e.references_kind(CoordKind::dI))
      throw ParseError(pe.line, pe.column, label + " may only use q and p coordinates", "");
    return e;
  };

  SystemDef sys;
  sys.m = m;
  sys.separable = separable.value_or(false);
  sys.H = parse_at(*h_line, "H");
  sys.F.reserve(m);
  for (std::size_t k = 1; k <= m; ++k)
    sys.F.push_back(parse_at(f_lines.at(k), "F" + std::to_string(k)));
  sys.params = std::move(params);
  sys.validate();
  return sys;
}

}  // namespace cisjac
