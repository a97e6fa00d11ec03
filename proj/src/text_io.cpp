#include "tips/text_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tips/version.hpp"

namespace tips {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json provenance_block(const std::string& command,
                                        std::uint64_t seed,
                                        const nlohmann::ordered_json& config) {
  nlohmann::ordered_json p;
  p["version"] = kVersion;
  p["command"] = command;
  p["seed"] = seed;
  p["config"] = config;
  return p;
}

std::string sweep_csv(std::span<const SweepRecord> rows,
                      const nlohmann::ordered_json& provenance) {
  std::ostringstream out;
  out << "# provenance: " << provenance.dump() << "\n";
  out << "method,horizon,particles,replicate,seed,estimate,abs_log_error,"
         "weight_variance,ess,cpu_ms,status\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_double(r.horizon) << ',' << r.particles
        << ',' << r.replicate << ',' << r.seed << ','
        << format_double(r.estimate) << ',' << format_double(r.abs_log_error)
        << ',' << format_double(r.weight_variance) << ','
        << format_double(r.ess) << ',' << format_double(r.cpu_ms) << ','
        << r.status << '\n';
  }
  return out.str();
}

std::string chain_csv(std::span<const std::string> parameter_names,
                      std::span<const long> iterations,
                      std::span<const int> accepted,
                      std::span<const double> log_z,
                      const std::vector<std::vector<double>>& values,
                      const nlohmann::ordered_json& provenance) {
  std::ostringstream out;
  out << "# provenance: " << provenance.dump() << "\n";
  out << "iter,accepted,log_z";
  for (const auto& n : parameter_names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < iterations.size(); ++i) {
    out << iterations[i] << ',' << accepted[i] << ','
        << format_double(log_z[i]);
    for (const auto& series : values) out << ',' << format_double(series[i]);
    out << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

nlohmann::ordered_json extract_provenance(const std::string& file_content) {
  const std::string marker = "# provenance: ";
  if (file_content.rfind(marker, 0) == 0) {
    const auto end = file_content.find('\n');
    const std::string line =
        file_content.substr(marker.size(),
                            end == std::string::npos ? std::string::npos
                                                     : end - marker.size());
    return nlohmann::ordered_json::parse(line);
  }
  const auto doc = nlohmann::ordered_json::parse(file_content);
  if (!doc.contains("provenance"))
    throw std::runtime_error("file carries no provenance block");
  return doc.at("provenance");
}

}  // namespace tips
