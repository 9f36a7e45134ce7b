#include "kdvcrit/serialize.hpp"

#include <cstdio>
#include <fstream>

namespace kdvcrit::io {

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const arith::Pair& p) {
  return Json{{"k", p.k}, {"l", p.l}, {"s_class", arith::to_string(p.s_class)}};
}

Json to_json(const arith::CriticalIndex& ci) {
  Json pairs = Json::array();
  for (const auto& p : ci.pairs) pairs.push_back(to_json(p));
  return Json{{"n", ci.n},
              {"pairs", pairs},
              {"Z", ci.Z},
              {"N", ci.N},
              {"dim_M", ci.dim_M},
              {"new_class", arith::to_string(ci.new_class)},
              {"old_class", arith::to_string(ci.old_class)},
              {"length", ci.length}};
}

std::string_view to_string(modes::ModeKind k) {
  switch (k) {
    case modes::ModeKind::Type1: return "Type1";
    case modes::ModeKind::Type2: return "Type2";
    case modes::ModeKind::EtaCombination: return "EtaCombination";
  }
  return "?";
}

Json to_json(const modes::ModeSpec& m) {
  Json ex = Json::array(), co = Json::array();
  for (int j = 0; j < 3; ++j) {
    ex.push_back(to_json(m.exponents[j]));
    co.push_back(to_json(m.coefficients[j]));
  }
  return Json{{"kind", to_string(m.kind)}, {"L", m.L}, {"exponents", ex}, {"coefficients", co}, {"lambda", m.lambda}};
}

Json to_json(const modes::TrappingDirection& td) {
  Json eta = Json::array();
  for (const auto& e : td.eta) eta.push_back(to_json(e));
  return Json{{"pair", Json::array({td.k, td.l})},
              {"L", td.L},
              {"p", td.p},
              {"eta", eta},
              {"phi", to_json(td.phi)},
              {"E", to_json(td.E)},
              {"E_closed_form", to_json(td.E_closed)},
              {"sum_eta_ratio", to_json(td.sum_eta_ratio)}};
}

Json to_json(const roots::RootTriple& rt) {
  Json r = Json::array();
  for (const auto& z : rt.roots) r.push_back(to_json(z));
  return Json{{"tau", to_json(rt.tau)}, {"roots", r}};
}

Json to_json(const basym::CoefTable& c) {
  Json j = Json::object();
  const auto names = basym::CoefTable::names();
  const auto vals = c.values();
  for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = to_json(vals[i]);
  return j;
}

Json to_json(const basym::BScan& scan) {
  return Json{{"points", scan.rows.size()},
              {"tau_min", scan.rows.empty() ? 0.0 : scan.rows.front().tau},
              {"tau_max", scan.rows.empty() ? 0.0 : scan.rows.back().tau},
              {"residual_slope", scan.residual_fit.slope},
              {"residual_fit_r2", scan.residual_fit.r2},
              {"E_estimate", to_json(scan.E_estimate)},
              {"bound_constant", scan.bound_constant}};
}

Json to_json(const sim::TrapResult& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back(Json{{"eps", r.eps}, {"r", r.r}});
  return Json{{"rows", rows}, {"ratios", t.ratios}, {"pass", t.pass}};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> s;
  s.reserve(values.size());
  for (double v : values) s.push_back(num(v));
  row(s);
}

void CsvWriter::row(const std::vector<std::string>& values) {
  if (values.size() != width_) throw Error("CsvWriter: row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += values[i];
  }
  text_ += '\n';
}

}  // namespace kdvcrit::io
