#include "cavsim/trace_io.hpp"

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace cavsim {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_number(v);
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string field_trace_csv(const FieldTrace& trace) {
  std::string out = "t_s,tau,re_a,im_a,chi_minus,phi_rad,n_atoms,loc_factor\n";
  for (const auto& s : trace.samples)
    append_row(out, {s.t, s.tau, s.a.real(), s.a.imag(), s.chi_minus, s.phi, s.n_atoms, s.loc});
  return out;
}

std::string particle_trace_csv(const ParticleTrace& trace) {
  std::string out =
      "t_s,tau,re_a,im_a,chi_minus,phi_rad,n_atoms,loc_factor,sigma_theta,sigma_rho,sigma_prho,"
      "mean_energy\n";
  for (const auto& p : trace.samples) {
    const auto& s = p.field;
    append_row(out, {s.t, s.tau, s.a.real(), s.a.imag(), s.chi_minus, s.phi, s.n_atoms, s.loc,
                     p.sigma_theta, p.sigma_rho, p.sigma_prho, p.mean_energy});
  }
  return out;
}

std::string summary_csv(const SummaryTable& table) {
  std::string out = "# " + table.description + "; columns:";
  for (std::size_t k = 0; k < table.columns.size(); ++k) out += (k ? ", " : " ") + table.columns[k];
  out += '\n';
  for (std::size_t k = 0; k < table.columns.size(); ++k) out += (k ? "," : "") + table.columns[k];
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + row[k];
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

}  // namespace cavsim
