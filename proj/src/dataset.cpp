#include "vesseltrace/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "vesseltrace/error.hpp"

namespace vesseltrace {
namespace {

namespace fs = std::filesystem;

bool is_raster_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm";
}

std::string case_id(const fs::path& p) {
  const std::string stem = p.stem().string();
  return stem.substr(0, stem.find('_'));
}

/// id -> file for every raster file in dir. Two files with one id is an error.
std::map<std::string, fs::path> files_by_id(const fs::path& dir) {
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !is_raster_file(entry.path())) continue;
    const std::string id = case_id(entry.path());
    if (id.empty()) continue;
    if (!out.emplace(id, entry.path()).second) {
      throw Error(ErrorKind::IncompleteCase, "two files for case " + id + " in " + dir.string());
    }
  }
  return out;
}

fs::path require_dir(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorKind::MissingDirectory, dir.string());
  return dir;
}

}  // namespace

Split parse_split(std::string_view name) {
  if (name == "train" || name == "training") return Split::Train;
  if (name == "test") return Split::Test;
  throw Error(ErrorKind::InvalidArgument, "unknown split '" + std::string(name) + "' (train|test)");
}

std::string_view to_string(Split split) noexcept { return split == Split::Train ? "train" : "test"; }

const fs::path& DatasetIndex::ground_truth(const DatasetCase& c, int observer) const {
  if (observer == 1) return c.gt1;
  if (observer == 2 && c.gt2) return *c.gt2;
  throw Error(ErrorKind::IncompleteCase, "case " + c.id + " has no ground truth for observer " + std::to_string(observer));
}

DatasetIndex index_drive(const fs::path& root, Split split) {
  require_dir(root);
  fs::path base = root / std::string(to_string(split));
  std::error_code ec;
  if (split == Split::Train && !fs::is_directory(base, ec)) base = root / "training";
  require_dir(base);

  const auto images = files_by_id(require_dir(base / "images"));
  const auto masks = files_by_id(require_dir(base / "mask"));
  const auto first = files_by_id(require_dir(base / "1st_manual"));
  std::map<std::string, fs::path> second;
  const bool need_second = split == Split::Test;
  if (need_second || fs::is_directory(base / "2nd_manual", ec)) {
    second = files_by_id(require_dir(base / "2nd_manual"));
  }

  DatasetIndex index;
  for (const auto& [id, image] : images) {
    DatasetCase c{id, image, {}, {}, std::nullopt};
    auto missing = [&](const char* what) {
      return Error(ErrorKind::IncompleteCase, "case " + id + ": no " + what + " file");
    };
    if (auto it = masks.find(id); it != masks.end()) c.mask = it->second;
    else throw missing("mask");
    if (auto it = first.find(id); it != first.end()) c.gt1 = it->second;
    else throw missing("1st_manual");
    if (auto it = second.find(id); it != second.end()) c.gt2 = it->second;
    else if (need_second) throw missing("2nd_manual");
    index.cases.push_back(std::move(c));
  }
  if (index.cases.empty()) throw Error(ErrorKind::IncompleteCase, "no images under " + (base / "images").string());
  return index;
}

}  // namespace vesseltrace
