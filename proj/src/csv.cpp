#include "nlslab/csv.hpp"

#include <fstream>

#include <fmt/format.h>

#include "nlslab/error.hpp"

namespace nlslab {

const std::vector<CsvSchema>& csv_schemas() {
  static const std::vector<CsvSchema> all{
      {"conserved", 1, "t,Q,M,E,S,Lambda"},
      {"modulation", 1, "t,xi,theta,xidot,thetadot,dR_modulated"},
      {"distance", 1, "t,dR_modulated,dR_raw"},
      {"spectrum", 1, "index,eigenvalue,residual"},
      {"eigenvectors", 1, ""},
      {"probe", 1, "sample_id,seed,dR,rho,gap,ratio"},
      {"sweep", 1, "dR,gap,ratio"},
      {"checks", 1, "name,value,tolerance,passed"},
      {"snapshot", 1, "x,re_phi,im_phi"},
  };
  return all;
}

const CsvSchema& csv_schema(std::string_view name) {
  for (const auto& s : csv_schemas())
    if (s.name == name) return s;
  raise(Errc::InvalidArgument, fmt::format("unknown csv schema '{}'", name));
}

std::string schema_line(const CsvSchema& s) { return fmt::format("# schema: nlslab.{}/{}", s.name, s.version); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) raise(Errc::InvalidArgument, fmt::format("cannot write {}", path.string()));
}

void write_csv(const std::filesystem::path& path, std::string_view schema, const std::string& body) {
  const CsvSchema& s = csv_schema(schema);
  const std::string_view first = std::string_view(body).substr(0, body.find('\n'));
  if (!s.header.empty() && first != s.header)
    raise(Errc::InvalidArgument, fmt::format("csv body header '{}' does not match schema {}", first, s.name));
  write_text(path, schema_line(s) + "\n" + body);
}

}  // namespace nlslab
