#include "greenp2cli/map_io.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "greenp2/error.hpp"

namespace greenp2cli {

using greenp2::Complex;
using greenp2::Error;
using greenp2::ErrorCode;
using greenp2::HomogPoly3;
using greenp2::ProjMap;
using greenp2::ProjPoint;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

std::string line_col(std::string_view text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

long long integer_field(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + ": expected an integer");
  return v.get<long long>();
}

double number_field(const Json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  return v.get<double>();
}

}  // namespace

ProjMap parse_map(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail("invalid JSON at " + line_col(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) fail("/: map file must be a JSON object");
  for (const auto& [key, value] : doc.items())
    if (key != "schema" && key != "degree" && key != "components" && key != "metadata")
      fail("/" + key + ": unknown field");
  if (!doc.contains("schema")) fail("/schema: missing");
  if (integer_field(doc["schema"], "/schema") != 1) fail("/schema: unsupported version");
  if (!doc.contains("degree")) fail("/degree: missing");
  const long long d = integer_field(doc["degree"], "/degree");
  if (d < 1 || d > 64) fail("/degree: must lie in 1..64");
  if (doc.contains("metadata") && !doc["metadata"].is_object()) fail("/metadata: expected an object");
  if (!doc.contains("components")) fail("/components: missing");
  const Json& comps = doc["components"];
  if (!comps.is_array() || comps.size() != 3) fail("/components: expected three component lists");

  const int deg = static_cast<int>(d);
  std::array<HomogPoly3, 3> f{HomogPoly3(deg), HomogPoly3(deg), HomogPoly3(deg)};
  for (int c = 0; c < 3; ++c) {
    const std::string cpath = "/components/" + std::to_string(c);
    const Json& terms = comps[static_cast<std::size_t>(c)];
    if (!terms.is_array()) fail(cpath + ": expected a list of monomials");
    std::map<std::array<long long, 3>, bool> seen;
    for (std::size_t m = 0; m < terms.size(); ++m) {
      const std::string path = cpath + "/" + std::to_string(m);
      const Json& t = terms[m];
      if (!t.is_array() || t.size() != 5) fail(path + ": expected [i, j, k, re, im]");
      std::array<long long, 3> e{};
      for (std::size_t q = 0; q < 3; ++q) {
        e[q] = integer_field(t[q], path + "/" + std::to_string(q));
        if (e[q] < 0) fail(path + ": negative exponent");
      }
      const double re = number_field(t[3], path + "/3");
      const double im = number_field(t[4], path + "/4");
      std::ostringstream mono;
      mono << "(" << e[0] << "," << e[1] << "," << e[2] << ")";
      if (e[0] + e[1] + e[2] != d)
        fail(path + ": exponents " + mono.str() + " do not sum to the degree " + std::to_string(d));
      if (seen[e]) fail(path + ": duplicate monomial " + mono.str());
      seen[e] = true;
      f[static_cast<std::size_t>(c)].set_coeff(static_cast<int>(e[0]), static_cast<int>(e[1]),
                                               static_cast<int>(e[2]), Complex(re, im));
    }
  }
  return ProjMap::validate(std::move(f));
}

ProjMap load_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path + ": cannot open map file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

Json map_to_json(const ProjMap& f, const Json& metadata) {
  Json comps = Json::array();
  for (int c = 0; c < 3; ++c) {
    Json terms = Json::array();
    f[c].for_each_term([&](int i, int j, int k, Complex v) {
      if (v != Complex(0.0)) terms.push_back(Json::array({i, j, k, v.real(), v.imag()}));
    });
    comps.push_back(std::move(terms));
  }
  Json out;
  out["schema"] = 1;
  out["degree"] = f.degree();
  out["components"] = std::move(comps);
  out["metadata"] = metadata;
  return out;
}

namespace {

using Exps = std::array<int, 3>;
using Poly = std::map<Exps, Complex>;

Poly constant_poly(Complex c) { return {{Exps{0, 0, 0}, c}}; }

Poly add(Poly a, const Poly& b, double sign) {
  for (const auto& [e, c] : b) a[e] += sign * c;
  return a;
}

Poly mul(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) out[{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]}] += ca * cb;
  return out;
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  Poly parse() {
    Poly p = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail("expression \"" + std::string(s_) + "\", column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  bool starts_atom(char c) const {
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' || c == 'z' || c == 'w' || c == 't' ||
           c == 'i';
  }

  Poly expr() {
    Poly p = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      p = add(std::move(p), term(), c == '+' ? 1.0 : -1.0);
    }
    return p;
  }

  Poly term() {
    Poly p = unary();
    for (char c = peek();; c = peek()) {
      if (c == '*') {
        ++pos_;
        p = mul(p, unary());
      } else if (starts_atom(c)) {
        p = mul(p, power());
      } else {
        return p;
      }
    }
  }

  Poly unary() {
    const char c = peek();
    if (c == '-' || c == '+') {
      ++pos_;
      Poly p = unary();
      return c == '-' ? add(Poly{}, p, -1.0) : p;
    }
    return power();
  }

  Poly power() {
    Poly base = atom();
    if (peek() != '^') return base;
    ++pos_;
    skip();
    int n = 0;
    const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), n);
    if (ec != std::errc() || n < 0 || n > 64) error("expected an exponent in 0..64");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    Poly out = constant_poly(1.0);
    for (int k = 0; k < n; ++k) out = mul(out, base);
    return out;
  }

  Poly atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Poly p = expr();
      if (peek() != ')') error("expected ')'");
      ++pos_;
      return p;
    }
    if (c == 'z' || c == 'w' || c == 't') {
      ++pos_;
      Exps e{0, 0, 0};
      e[c == 'z' ? 0 : c == 'w' ? 1 : 2] = 1;
      return {{e, 1.0}};
    }
    if (c == 'i') {
      ++pos_;
      return constant_poly(Complex(0.0, 1.0));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
      if (ec != std::errc()) error("malformed number");
      pos_ = static_cast<std::size_t>(ptr - s_.data());
      return constant_poly(v);
    }
    error(c == '\0' ? "unexpected end" : "unexpected character");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

HomogPoly3 to_homog(const Poly& p, std::string_view text) {
  int degree = -1;
  for (const auto& [e, c] : p) {
    if (c == Complex(0.0)) continue;
    const int deg = e[0] + e[1] + e[2];
    if (degree >= 0 && deg != degree) fail("expression \"" + std::string(text) + "\" is not homogeneous");
    degree = deg;
  }
  if (degree < 0) fail("expression \"" + std::string(text) + "\" is identically zero");
  HomogPoly3 h(degree);
  for (const auto& [e, c] : p)
    if (c != Complex(0.0)) h.set_coeff(e[0], e[1], e[2], c);
  return h;
}

}  // namespace

HomogPoly3 parse_curve(std::string_view expr) {
  const HomogPoly3 h = to_homog(ExprParser(expr).parse(), expr);
  if (h.degree() < 1) fail("expression \"" + std::string(expr) + "\" has degree 0");
  return h;
}

ProjPoint parse_point(std::string_view text) {
  const char sep = text.find(':') != std::string_view::npos ? ':' : ',';
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i)
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  if (parts.size() != 3) fail("point \"" + std::string(text) + "\": expected three coordinates");
  greenp2::Vec3 x{};
  for (std::size_t q = 0; q < 3; ++q) {
    const Poly p = ExprParser(parts[q]).parse();
    for (const auto& [e, c] : p)
      if (e != Exps{0, 0, 0} && c != Complex(0.0))
        fail("point \"" + std::string(text) + "\": coordinates must be constants");
    const auto it = p.find(Exps{0, 0, 0});
    x[q] = it == p.end() ? Complex(0.0) : it->second;
  }
  if (greenp2::norm3(x) == 0.0) fail("point \"" + std::string(text) + "\": all coordinates vanish");
  return ProjPoint::from(x);
}

}  // namespace greenp2cli
