#include "plap/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

std::string solution_csv(const Certificate& cert) {
  if (!cert.solution) throw std::invalid_argument("certificate has no solution");
  const PeriodicSample& u = *cert.solution;
  const Grid& grid = u.grid();
  const auto d = u.derivative();
  std::string out = "t,u,du,residual\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = i < cert.node_residuals.size() ? cert.node_residuals[i] : 0.0;
    out += g17(grid.node(i)) + "," + g17(u.value(i)) + "," + g17(d[i]) + "," + g17(r) + "\n";
  }
  return out;
}

std::string render_report(const Certificate& cert) {
  std::ostringstream os;
  os << "HYPOTHESES\n";
  if (cert.hypotheses) {
    for (const auto& l : cert.hypotheses->lines()) os << "  " << l << "\n";
  } else {
    os << "  (not evaluated)\n";
  }

  os << "\nBOUNDS\n";
  if (cert.ledger.empty()) os << "  (none)\n";
  for (const auto& [k, v] : cert.ledger) os << "  " << k << " = " << format_number(v) << "\n";

  os << "\nSOLUTION\n";
  if (cert.solution) {
    const auto u = cert.solution->values();
    const auto d = cert.solution->derivative();
    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    double dsup = 0.0;
    for (double x : d) dsup = std::max(dsup, std::abs(x));
    os << "  nodes = " << u.size() << "\n";
    os << "  min u = " << format_number(*lo) << "\n";
    os << "  max u = " << format_number(*hi) << "\n";
    os << "  sup |du| = " << format_number(dsup) << "\n";
    os << "  residual = " << format_number(cert.residual) << "\n";
  } else {
    os << "  (none)\n";
  }

  os << "\nCERTIFICATE\n";
  os << "  status = " << to_string(cert.status) << "\n";
  os << "  reason = " << cert.reason << "\n";
  if (cert.bracket) {
    const auto& b = *cert.bracket;
    os << "  bracket.alpha = " << format_number(b.alpha) << "\n";
    os << "  bracket.beta_min = " << format_number(b.beta_min) << "\n";
    os << "  bracket.beta_max = " << format_number(b.beta_max) << "\n";
    os << "  bracket.delta = " << format_number(b.delta) << "\n";
    os << "  bracket.c_delta = " << format_number(b.c_delta) << "\n";
    os << "  bracket.lower_margin = " << format_number(b.lower_margin) << "\n";
    os << "  bracket.upper_margin = " << format_number(b.upper_margin) << "\n";
    os << "  bracket.upper_check = " << format_number(b.upper_check) << "\n";
  }
  for (const auto& d : cert.diagnostics) os << "  diagnostic: " << d << "\n";
  return os.str();
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "hbar,status,residual,reason\n";
  for (const auto& r : rows) {
    out += format_number(r.hbar) + "," + std::string(to_string(r.cert.status)) + "," +
           (r.cert.solution ? g17(r.cert.residual) : std::string{}) + "," + csv_field(r.cert.reason) + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void export_certificate(const Certificate& cert, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_text(dir / "report.txt", render_report(cert));
  if (cert.solution) write_text(dir / "solution.csv", solution_csv(cert));
}

}  // namespace plap
