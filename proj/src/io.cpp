#include "vbpg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "vbpg/errors.hpp"

namespace vbpg {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace_csv(const SolverTrace& trace, std::ostream& os) {
  os << "k,F,step_norm,gap,envelope,residual_bound\n";
  for (const auto& r : trace.records) {
    os << r.k << ',' << format_double(r.F) << ',' << format_double(r.step_norm) << ','
       << format_double(r.gap) << ',' << format_double(r.envelope) << ','
       << format_double(r.residual_bound) << '\n';
  }
}

std::string trace_csv(const SolverTrace& trace) {
  std::ostringstream os;
  write_trace_csv(trace, os);
  return os.str();
}

json to_json(const Point& x) {
  json a = json::array();
  for (Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
  return a;
}

Point point_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of numbers");
  Point x(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("expected a number in vector entry");
    x[static_cast<Index>(i)] = j[i].get<double>();
  }
  return x;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError("expected a matrix as an array of rows");
  const std::size_t rows = j.size(), cols = j[0].size();
  Matrix A(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw ConfigError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) throw ConfigError("expected a number in matrix entry");
      A(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return A;
}

json trace_summary(const SolverTrace& trace) {
  const auto& c = trace.constants;
  return json{{"iters", trace.iters()},
              {"final_point", to_json(trace.final_point)},
              {"F_limit", trace.F_limit},
              {"stop_reason", to_string(trace.stop)},
              {"constants",
               {{"m", c.m},
                {"M", c.M},
                {"eps_lo", c.eps_lo},
                {"eps_hi", c.eps_hi},
                {"L", c.L},
                {"a", c.a},
                {"frak_b", c.frak_b},
                {"frak_c", c.frak_c},
                {"kappa", c.kappa},
                {"c0", c.c0}}}};
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::system_error(ec, "cannot rename into " + path.string());
  }
}

}  // namespace vbpg
