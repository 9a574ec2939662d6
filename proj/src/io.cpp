#include "dyadic/io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>

#include "dyadic/haar.hpp"

namespace dyadic {

namespace {

static_assert(std::endian::native == std::endian::little, "binary I/O assumes a little-endian host");

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

Json grid_json(const Grid& g) {
  Json j = {{"d", g.dim()}, {"N", g.depth()}};
  if (g.spec().shifted()) j["omega"] = g.spec().omega;
  return j;
}

Grid grid_from(const Json& j) {
  GridSpec s{get<int>(j, "d"), get<int>(j, "N"), {}};
  if (j.contains("omega")) s.omega = j.at("omega").get<std::vector<std::vector<int>>>();
  try {
    return Grid(s);
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid grid: ") + e.what());
  }
}

Json cube_json(const Grid& g, Cube c) { return {{"level", c.level}, {"pos", g.position(c)}}; }

Cube cube_from(const Grid& g, const Json& j) {
  try {
    return g.cube_at(get<int>(j, "level"), get<std::vector<int>>(j, "pos"));
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid cube: ") + e.what());
  }
}

Json haar_json(const Grid& g, HaarIndex h) {
  Json j = cube_json(g, h.cube);
  std::vector<int> bits;
  for (int a = 0; a < g.dim(); ++a) bits.push_back(static_cast<int>((h.sig >> (g.dim() - 1 - a)) & 1u));
  j["sig"] = bits;
  return j;
}

HaarIndex haar_from(const Grid& g, const Json& j) {
  const auto bits = get<std::vector<int>>(j, "sig");
  if (static_cast<int>(bits.size()) != g.dim()) throw FormatError("signature length differs from d");
  Signature s = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw FormatError("signature bits must be 0 or 1");
    s = (s << 1) | static_cast<Signature>(b);
  }
  return {cube_from(g, j), s};
}

Eigen::VectorXd row_major(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  Eigen::Index x = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) v[x++] = m(r, c);
  return v;
}

Json form_json(const Grid& g, const Form& form) {
  if (const auto* b = std::get_if<BkOperator>(&form))
    return {{"type", "Bk"}, {"k", b->k}, {"sig_b", b->sig_b}, {"sig_in", b->sig_in}, {"sig_out", b->sig_out}};
  const auto& p = std::get<POperator>(form);
  return {{"type", "P"}, {"adjoint", p.adjoint}, {"symbol", to_json(DyadicFunction(g, synthesize(g, p.symbol_coeffs)))}};
}

Form form_from(const Grid& g, const Json& j) {
  const auto type = get<std::string>(j, "type");
  if (type == "Bk") {
    const int k = get<int>(j, "k");
    const auto sb = get<Signature>(j, "sig_b");
    BkOperator op{k, sb, get<Signature>(j, "sig_in"), get<Signature>(j, "sig_out"), haar_product_beta(g, k, sb)};
    op.validate(g);
    return op;
  }
  if (type == "P") {
    const DyadicFunction a = function_from_json(j.at("symbol"));
    require_same_grid(a.grid(), g, "P symbol");
    return POperator::from_symbol(a, get<bool>(j, "adjoint"));
  }
  throw FormatError("unknown form type '" + type + "'");
}

void write_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) throw FormatError("truncated header");
  return v;
}

void read_magic(std::istream& in, const char* magic) {
  std::array<char, 4> m{};
  if (!in.read(m.data(), 4) || std::memcmp(m.data(), magic, 4) != 0)
    throw FormatError(std::string("bad magic, expected ") + magic);
}

Eigen::VectorXd read_doubles(std::istream& in, std::size_t n) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  if (!in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))))
    throw FormatError("truncated sample data");
  return v;
}

Grid binary_grid(std::uint32_t d, std::uint32_t n) {
  try {
    return Grid(GridSpec{static_cast<int>(d), static_cast<int>(n), {}});
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid grid in header: ") + e.what());
  }
}

}  // namespace

Json to_json(const DyadicFunction& f) {
  Json j = grid_json(f.grid());
  j["samples"] = std::vector<double>(f.samples().begin(), f.samples().end());
  return j;
}

DyadicFunction function_from_json(const Json& j) {
  const Grid g = grid_from(j);
  const auto s = get<std::vector<double>>(j, "samples");
  if (s.size() != g.size()) throw FormatError("sample count does not match the grid");
  return {g, Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()))};
}

Json to_json(const ProductFunction& f) {
  const Eigen::VectorXd v = row_major(f.samples());
  return {{"first", grid_json(f.grid().first)},
          {"second", grid_json(f.grid().second)},
          {"samples", std::vector<double>(v.begin(), v.end())}};
}

ProductFunction product_from_json(const Json& j) {
  const ProductGrid g{grid_from(j.at("first")), grid_from(j.at("second"))};
  const auto s = get<std::vector<double>>(j, "samples");
  const auto rows = static_cast<Eigen::Index>(g.first.size()), cols = static_cast<Eigen::Index>(g.second.size());
  if (static_cast<Eigen::Index>(s.size()) != rows * cols) throw FormatError("sample count does not match the grids");
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index x = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = s[static_cast<std::size_t>(x++)];
  return {g, m};
}

Json to_json(const ShiftOperator& s) {
  const Grid& g = s.grid();
  Json j = grid_json(g);
  j["i"] = s.i();
  j["j"] = s.j();
  j["kind"] = s.kind() == ShiftKind::cancellative ? "cancellative" : "noncancellative";
  if (s.kind() == ShiftKind::noncancellative) {
    j["orientation"] = s.orientation() == Orientation::analysis ? "analysis" : "synthesis";
    j["normalization"] = s.normalization();
    if (s.symbol()) j["symbol"] = to_json(*s.symbol());
  }
  Json entries = Json::array();
  for (const ShiftEntry& e : s.entries())
    entries.push_back({{"K", cube_json(g, e.K)}, {"I", haar_json(g, e.I)}, {"J", haar_json(g, e.J)}, {"a", e.a}});
  j["entries"] = std::move(entries);
  return j;
}

ShiftOperator shift_from_json(const Json& j) {
  const Grid g = grid_from(j);
  const auto kind = get<std::string>(j, "kind");
  if (kind != "cancellative" && kind != "noncancellative") throw FormatError("unknown shift kind '" + kind + "'");
  try {
    if (kind == "noncancellative" && j.contains("symbol")) {
      const auto o = get<std::string>(j, "orientation");
      if (o != "analysis" && o != "synthesis") throw FormatError("unknown orientation '" + o + "'");
      const double norm = j.contains("normalization") ? j.at("normalization").get<double>() : 1.0;
      return ShiftOperator::from_symbol(function_from_json(j.at("symbol")),
                                        o == "analysis" ? Orientation::analysis : Orientation::synthesis, norm);
    }
    std::vector<ShiftEntry> entries;
    for (const Json& e : j.at("entries"))
      entries.push_back({cube_from(g, e.at("K")), haar_from(g, e.at("I")), haar_from(g, e.at("J")), get<double>(e, "a")});
    ShiftOperator s(g, get<int>(j, "i"), get<int>(j, "j"), std::move(entries));
    if ((s.kind() == ShiftKind::cancellative) != (kind == "cancellative"))
      throw FormatError("entries do not match the declared kind");
    return s;
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("invalid shift: ") + e.what());
  }
}

Json to_json(const TermList& t) {
  Json j;
  j["biparam"] = t.biparam();
  if (t.b) j["b"] = to_json(*t.b);
  if (t.b2) j["b"] = to_json(*t.b2);
  Json shifts = Json::object();
  Json terms = Json::array();
  for (const Term& term : t.terms) {
    Json factors = Json::array();
    for (std::size_t v = 0; v < term.factors.size(); ++v) {
      const TermFactor& f = term.factors[v];
      const Grid g = t.b ? t.b->grid() : t.b2->grid()[static_cast<int>(v) + 1];
      Json fj = {{"form", form_json(g, f.form)}};
      if (f.pre) {
        fj["pre"] = f.pre_name;
        if (!shifts.contains(f.pre_name)) shifts[f.pre_name] = to_json(*f.pre);
      }
      if (f.post) {
        fj["post"] = f.post_name;
        if (!shifts.contains(f.post_name)) shifts[f.post_name] = to_json(*f.post);
      }
      factors.push_back(std::move(fj));
    }
    terms.push_back({{"kind", term.kind},
                     {"provenance", term.provenance},
                     {"weight", term.weight},
                     {"adjoint", term.adjoint},
                     {"factors", std::move(factors)}});
  }
  j["shifts"] = std::move(shifts);
  j["terms"] = std::move(terms);
  return j;
}

TermList terms_from_json(const Json& j) {
  TermList t;
  const bool bi = get<bool>(j, "biparam");
  if (bi)
    t.b2 = product_from_json(j.at("b"));
  else
    t.b = function_from_json(j.at("b"));
  std::map<std::string, ShiftRef> shifts;
  for (const auto& [name, sj] : j.at("shifts").items())
    shifts[name] = std::make_shared<const ShiftOperator>(shift_from_json(sj));
  auto lookup = [&](const Json& fj, const char* key) -> std::pair<ShiftRef, std::string> {
    if (!fj.contains(key)) return {nullptr, ""};
    const auto name = fj.at(key).get<std::string>();
    const auto it = shifts.find(name);
    if (it == shifts.end()) throw FormatError("unknown shift reference '" + name + "'");
    return {it->second, name};
  };
  for (const Json& tj : j.at("terms")) {
    Term term;
    term.kind = get<std::string>(tj, "kind");
    term.provenance = get<std::string>(tj, "provenance");
    term.weight = get<double>(tj, "weight");
    term.adjoint = get<bool>(tj, "adjoint");
    const Json& factors = tj.at("factors");
    if (factors.size() != (bi ? 2u : 1u)) throw FormatError("factor count does not match the term list");
    for (std::size_t v = 0; v < factors.size(); ++v) {
      const Grid g = bi ? t.b2->grid()[static_cast<int>(v) + 1] : t.b->grid();
      const auto [pre, pre_name] = lookup(factors[v], "pre");
      const auto [post, post_name] = lookup(factors[v], "post");
      for (const ShiftRef& s : {pre, post})
        if (s && !(s->grid() == g)) throw FormatError("shift grid does not match its variable");
      term.factors.push_back({form_from(g, factors[v].at("form")), pre, post, pre_name, post_name});
    }
    t.terms.push_back(std::move(term));
  }
  return t;
}

void write_binary(std::ostream& out, const DyadicFunction& f) {
  if (f.grid().spec().shifted()) throw FormatError("binary format stores standard grids only");
  out.write("DYF1", 4);
  write_u32(out, static_cast<std::uint32_t>(f.grid().dim()));
  write_u32(out, static_cast<std::uint32_t>(f.grid().depth()));
  write_u32(out, 0);
  out.write(reinterpret_cast<const char*>(f.samples().data()),
            static_cast<std::streamsize>(f.samples().size() * sizeof(double)));
}

DyadicFunction read_function_binary(std::istream& in) {
  read_magic(in, "DYF1");
  const std::uint32_t d = read_u32(in), n = read_u32(in);
  read_u32(in);
  const Grid g = binary_grid(d, n);
  return {g, read_doubles(in, g.size())};
}

void write_binary(std::ostream& out, const ProductFunction& f) {
  const ProductGrid& g = f.grid();
  if (g.first.spec().shifted() || g.second.spec().shifted())
    throw FormatError("binary format stores standard grids only");
  out.write("DYP1", 4);
  for (const Grid* x : {&g.first, &g.second}) {
    write_u32(out, static_cast<std::uint32_t>(x->dim()));
    write_u32(out, static_cast<std::uint32_t>(x->depth()));
  }
  write_u32(out, 0);
  const Eigen::VectorXd v = row_major(f.samples());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

ProductFunction read_product_binary(std::istream& in) {
  read_magic(in, "DYP1");
  const std::uint32_t d1 = read_u32(in), n1 = read_u32(in), d2 = read_u32(in), n2 = read_u32(in);
  read_u32(in);
  const ProductGrid g{binary_grid(d1, n1), binary_grid(d2, n2)};
  const auto rows = static_cast<Eigen::Index>(g.first.size()), cols = static_cast<Eigen::Index>(g.second.size());
  const Eigen::VectorXd v = read_doubles(in, g.first.size() * g.second.size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = v.segment(r * cols, cols).transpose();
  return {g, m};
}

void write_matrix_csv(std::ostream& out, const AverageResult& r) {
  out << "row,col,mean,stderr\n";
  char buf[96];
  for (Eigen::Index i = 0; i < r.mean.rows(); ++i)
    for (Eigen::Index c = 0; c < r.mean.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", r.mean(i, c), r.stderr_(i, c));
      out << i << ',' << c << ',' << buf << '\n';
    }
}

}  // namespace dyadic
