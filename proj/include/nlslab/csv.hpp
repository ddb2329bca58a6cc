#pragma once
// Output files: every CSV starts with a schema line "# schema: nlslab.<name>/<version>"
// followed by the column header. Readers (the plotting scripts) match on both.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nlslab {

struct CsvSchema {
  std::string_view name;
  int version;
  std::string_view header;  // empty for variable-width layouts (eigenvectors)
};

/// Known layouts; throws InvalidArgument for an unknown name.
const CsvSchema& csv_schema(std::string_view name);
const std::vector<CsvSchema>& csv_schemas();
std::string schema_line(const CsvSchema& s);

/// Writes schema line + body. The body starts with its column header, which
/// must equal the schema header when the schema fixes one.
void write_csv(const std::filesystem::path& path, std::string_view schema, const std::string& body);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nlslab
