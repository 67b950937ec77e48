#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vesseltrace {

enum class Split { Train, Test };

Split parse_split(std::string_view name);
std::string_view to_string(Split split) noexcept;

struct DatasetCase {
  std::string id;  ///< leading number of the image stem, e.g. "01"
  std::filesystem::path image;
  std::filesystem::path mask;
  std::filesystem::path gt1;
  std::optional<std::filesystem::path> gt2;
};

struct DatasetIndex {
  std::vector<DatasetCase> cases;  ///< sorted by id

  const std::filesystem::path& ground_truth(const DatasetCase& c, int observer) const;
};

/// Indexes a PNG-converted DRIVE tree:
///
///   <root>/<split>/images/<id>_*.png
///   <root>/<split>/1st_manual/<id>_manual1.png
///   <root>/<split>/2nd_manual/<id>_manual2.png   (test split)
///   <root>/<split>/mask/<id>_*_mask.png
///
/// The split directory is `test` or `train` (DRIVE's `training` is also
/// accepted). Files are matched to a case by the `<id>_` stem prefix.
DatasetIndex index_drive(const std::filesystem::path& root, Split split);

}  // namespace vesseltrace
