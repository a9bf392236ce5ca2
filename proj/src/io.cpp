#include "mmot/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mmot/error.hpp"

namespace mmot::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_distribution(std::ostream& out, const DiscreteDistribution& d) {
  const AtomKind kind = d.size() == 0 ? AtomKind::Scalar : d.atom(0).kind();
  out << "atom_kind," << to_string(kind) << '\n';
  for (std::size_t s = 0; s < d.size(); ++s) {
    const Atom& a = d.atom(s);
    switch (a.kind()) {
      case AtomKind::Scalar: out << format_double(a.as_scalar()); break;
      case AtomKind::Planar:
        out << format_double(a.as_point().x) << ',' << format_double(a.as_point().y);
        break;
      case AtomKind::Label: out << a.as_label(); break;
    }
    out << ',' << format_double(d.mass(s)) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string x;
  while (std::getline(ss, x, ',')) f.push_back(x);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  return f;
}

double parse_double(const std::string& s, std::size_t lineno, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw ParseError(std::string(what) + ": line " + std::to_string(lineno) + ": bad number '" + s +
                   "'");
}

}  // namespace

DiscreteDistribution read_distribution(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("distribution: empty file");
  const auto head = split(line);
  if (head.size() != 2 || head[0] != "atom_kind")
    throw ParseError("distribution: line 1: expected atom_kind,<kind>");
  AtomKind kind;
  try {
    kind = atom_kind_from_string(head[1]);
  } catch (const Error&) {
    throw ParseError("distribution: line 1: unknown atom kind '" + head[1] + "'");
  }
  const std::size_t width = kind == AtomKind::Planar ? 3 : 2;
  std::vector<Atom> atoms;
  std::vector<double> masses;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != width)
      throw ParseError("distribution: line " + std::to_string(lineno) + ": expected " +
                       std::to_string(width) + " fields");
    switch (kind) {
      case AtomKind::Scalar: atoms.push_back(Atom::scalar(parse_double(f[0], lineno, "distribution"))); break;
      case AtomKind::Planar:
        atoms.push_back(Atom::planar(parse_double(f[0], lineno, "distribution"),
                                     parse_double(f[1], lineno, "distribution")));
        break;
      case AtomKind::Label: atoms.push_back(Atom::label(f[0])); break;
    }
    masses.push_back(parse_double(f[width - 1], lineno, "distribution"));
  }
  if (atoms.empty()) throw ParseError("distribution: no atoms");
  return DiscreteDistribution(std::move(atoms), std::move(masses));
}

json to_json(const JointMass& j) {
  json out;
  out["shape"] = j.shape();
  out["entries"] = std::vector<double>(j.entries().begin(), j.entries().end());
  return out;
}

JointMass joint_from_json(const json& j) {
  try {
    return JointMass(j.at("shape").get<Shape>(), j.at("entries").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("joint mass json: ") + e.what());
  }
}

json to_json(const TransportResult& r, bool with_coupling) {
  json out;
  out["value"] = r.value;
  out["effectively_infinite"] = r.effectively_infinite;
  json terms = json::object();
  for (const auto& [pair, v] : r.per_pair_terms)
    terms[std::to_string(pair.first) + "," + std::to_string(pair.second)] = v;
  out["per_pair_terms"] = terms;
  if (with_coupling) out["coupling"] = to_json(r.coupling);
  return out;
}

json to_json(const MetricReport& r, std::size_t max_violations) {
  json out;
  out["nonnegative"] = r.nonnegative;
  out["symmetric"] = r.symmetric;
  out["identity"] = r.identity;
  out["triangle"] = r.triangle;
  out["audited"] = r.audited;
  out["empirical_C"] = std::isnan(r.empirical_C) ? json(nullptr) : json(r.empirical_C);
  out["violation_count"] = r.violations.size();
  json v = json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < max_violations; ++i)
    v.push_back({{"property", r.violations[i].property},
                 {"tuple", r.violations[i].tuple},
                 {"margin", r.violations[i].margin}});
  out["violations"] = v;
  return out;
}

json to_json(const ClusteringSolution& s) { return {{"labels", s.labels}, {"k", s.k}}; }

json to_json(const hash::HashAudit& a) {
  json hist = json::object();
  for (const auto& [mult, count] : a.histogram) hist[std::to_string(mult)] = count;
  return {{"n", a.n},
          {"listed", a.listed},
          {"distinct", a.counts.size()},
          {"max_multiplicity", a.max_multiplicity},
          {"histogram", hist},
          {"failures", a.failures},
          {"passed", a.passed}};
}

void write_confusion_csv(std::ostream& out, const std::vector<std::size_t>& pred,
                         const std::vector<std::size_t>& truth) {
  if (pred.size() != truth.size()) throw InvalidArgument("confusion: length mismatch");
  const std::set<std::size_t> p(pred.begin(), pred.end()), t(truth.begin(), truth.end());
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> c;
  for (std::size_t i = 0; i < pred.size(); ++i) ++c[{pred[i], truth[i]}];
  out << "pred";
  for (std::size_t y : t) out << ",true_" << y;
  out << '\n';
  for (std::size_t x : p) {
    out << x;
    for (std::size_t y : t) {
      auto it = c.find({x, y});
      out << ',' << (it == c.end() ? 0 : it->second);
    }
    out << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << contents;
  if (!out) throw Error("write failed: " + path);
}

}  // namespace mmot::io
