#include "vesseltrace/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace vesseltrace {
namespace {

namespace fs = std::filesystem;

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3
  std::vector<std::uint8_t> bytes;
};

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw Error(ErrorKind::FileMissing, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::FileMissing, path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------- PNM

Decoded decode_pnm(const std::vector<std::uint8_t>& data, const fs::path& path) {
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    for (;;) {
      while (pos < data.size() && std::isspace(data[pos])) ++pos;
      if (pos < data.size() && data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    if (pos >= data.size() || !std::isdigit(data[pos])) {
      throw Error(ErrorKind::TruncatedStream, "bad PNM header in " + path.string());
    }
    long v = 0;
    while (pos < data.size() && std::isdigit(data[pos])) {
      v = v * 10 + (data[pos] - '0');
      if (v > (1L << 30)) throw Error(ErrorKind::UnsupportedFormat, "PNM dimension too large");
      ++pos;
    }
    return v;
  };

  Decoded d;
  d.channels = data[1] == '6' ? 3 : 1;
  d.width = static_cast<int>(next_token());
  d.height = static_cast<int>(next_token());
  const long maxval = next_token();
  if (maxval != 255) {
    throw Error(ErrorKind::UnsupportedFormat, "only 8-bit PNM (maxval 255) is supported: " + path.string());
  }
  if (pos >= data.size() || !std::isspace(data[pos])) {
    throw Error(ErrorKind::TruncatedStream, "bad PNM header in " + path.string());
  }
  ++pos;
  const std::size_t need = static_cast<std::size_t>(d.width) * d.height * d.channels;
  if (data.size() - pos < need) {
    throw Error(ErrorKind::TruncatedStream, path.string());
  }
  d.bytes.assign(data.begin() + static_cast<std::ptrdiff_t>(pos),
                 data.begin() + static_cast<std::ptrdiff_t>(pos + need));
  return d;
}

// ---------------------------------------------------------------- PNG

struct PngReadState {
  const std::vector<std::uint8_t>* data = nullptr;
  std::size_t pos = 0;
  char message[256] = {};
  bool unsupported = false;
};

void png_read_bytes(png_structp png, png_bytep out, png_size_t n) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->data->size() - st->pos < n) {
    png_error(png, "unexpected end of stream");
  }
  std::copy_n(st->data->data() + st->pos, n, out);
  st->pos += n;
}

void png_on_error(png_structp png, png_const_charp msg) {
  auto* st = static_cast<PngReadState*>(png_get_error_ptr(png));
  std::snprintf(st->message, sizeof(st->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

// All C++ objects touched after setjmp are owned by the caller, so a longjmp
// never skips a destructor.
bool decode_png_raw(PngReadState& st, Decoded& d, std::vector<png_bytep>& rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &st, png_on_error, png_on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &st, png_read_bytes);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (depth == 16 || color == PNG_COLOR_TYPE_PALETTE) {
    st.unsupported = true;
    std::snprintf(st.message, sizeof(st.message), "%s", depth == 16 ? "16-bit PNG" : "palette PNG");
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  d.width = static_cast<int>(w);
  d.height = static_cast<int>(h);
  d.channels = (color & PNG_COLOR_MASK_COLOR) ? 3 : 1;
  if (png_get_rowbytes(png, info) != static_cast<png_size_t>(w) * d.channels) {
    st.unsupported = true;
    std::snprintf(st.message, sizeof(st.message), "unexpected PNG row layout");
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  d.bytes.resize(static_cast<std::size_t>(w) * h * d.channels);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) {
    rows[y] = d.bytes.data() + static_cast<std::size_t>(y) * w * d.channels;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

Decoded decode_png(const std::vector<std::uint8_t>& data, const fs::path& path) {
  PngReadState st;
  st.data = &data;
  Decoded d;
  std::vector<png_bytep> rows;
  if (!decode_png_raw(st, d, rows)) {
    const auto kind = st.unsupported ? ErrorKind::UnsupportedFormat : ErrorKind::TruncatedStream;
    throw Error(kind, path.string() + ": " + st.message);
  }
  return d;
}

Decoded decode(const fs::path& path) {
  const auto data = read_file(path);
  static constexpr std::array<std::uint8_t, 8> kPngMagic{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (data.size() >= 8 && std::equal(kPngMagic.begin(), kPngMagic.end(), data.begin())) {
    return decode_png(data, path);
  }
  if (data.size() >= 2 && data[0] == 'P' && (data[1] == '5' || data[1] == '6')) {
    return decode_pnm(data, path);
  }
  if (data.size() < 2) {
    throw Error(ErrorKind::TruncatedStream, path.string());
  }
  throw Error(ErrorKind::UnsupportedFormat, "not a PNG/PGM/PPM file: " + path.string());
}

// ---------------------------------------------------------------- writers

enum class Container { Png, Pgm, Ppm };

Container container_for(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return Container::Png;
  if (ext == ".pgm") return Container::Pgm;
  if (ext == ".ppm") return Container::Ppm;
  throw Error(ErrorKind::UnsupportedFormat, "cannot infer output format from extension: " + path.string());
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

bool write_png_raw(std::FILE* f, int width, int height, int channels, const std::uint8_t* bytes) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes + static_cast<std::size_t>(y) * width * channels));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_bytes(const fs::path& path, int width, int height, int channels, const std::vector<std::uint8_t>& bytes) {
  const Container container = container_for(path);
  if (container == Container::Pgm && channels != 1) {
    throw Error(ErrorKind::UnsupportedFormat, "PGM output needs a single channel: " + path.string());
  }
  if (container == Container::Ppm && channels != 3) {
    throw Error(ErrorKind::UnsupportedFormat, "PPM output needs three channels: " + path.string());
  }
  fs::path tmp = path;
  tmp += ".partial";
  bool ok = false;
  {
    FilePtr f(std::fopen(tmp.c_str(), "wb"));
    if (!f) {
      throw Error(ErrorKind::Unwritable, path.string());
    }
    if (container == Container::Png) {
      ok = write_png_raw(f.get(), width, height, channels, bytes.data());
    } else {
      const std::string header =
          std::string(channels == 3 ? "P6\n" : "P5\n") + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
      ok = std::fwrite(header.data(), 1, header.size(), f.get()) == header.size() &&
           std::fwrite(bytes.data(), 1, bytes.size(), f.get()) == bytes.size();
    }
    ok = (std::fflush(f.get()) == 0) && ok;
  }
  std::error_code ec;
  if (ok) {
    fs::rename(tmp, path, ec);
    ok = !ec;
  }
  if (!ok) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::Unwritable, path.string());
  }
}

}  // namespace

RGBImage load_rgb(const std::filesystem::path& path) {
  const Decoded d = decode(path);
  if (d.channels != 3) {
    throw Error(ErrorKind::UnsupportedFormat, "expected an RGB image: " + path.string());
  }
  RGBImage img(d.width, d.height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Rgb{d.bytes[3 * i], d.bytes[3 * i + 1], d.bytes[3 * i + 2]};
  }
  return img;
}

GrayImage load_gray(const std::filesystem::path& path) {
  const Decoded d = decode(path);
  GrayImage img(d.width, d.height);
  auto px = img.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (d.channels == 1) {
      px[i] = static_cast<float>(d.bytes[i] / 255.0);
    } else {
      const int sum = d.bytes[3 * i] + d.bytes[3 * i + 1] + d.bytes[3 * i + 2];
      px[i] = static_cast<float>(sum / 3.0 / 255.0);
    }
  }
  return img;
}

BinaryMask load_mask(const std::filesystem::path& path, std::uint8_t threshold) {
  const Decoded d = decode(path);
  BinaryMask mask(d.width, d.height);
  auto px = mask.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (d.channels == 1) {
      px[i] = d.bytes[i] > threshold ? 1 : 0;
    } else {
      const int sum = d.bytes[3 * i] + d.bytes[3 * i + 1] + d.bytes[3 * i + 2];
      px[i] = sum > 3 * static_cast<int>(threshold) ? 1 : 0;
    }
  }
  return mask;
}

std::uint8_t quantize(float v) noexcept {
  const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(255.0 * c + 0.5));
}

void save_gray(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), bytes.begin(), quantize);
  write_bytes(path, img.width(), img.height(), 1, bytes);
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(mask.size());
  std::transform(mask.pixels().begin(), mask.pixels().end(), bytes.begin(),
                 [](std::uint8_t v) -> std::uint8_t { return v ? 255 : 0; });
  write_bytes(path, mask.width(), mask.height(), 1, bytes);
}

void save_rgb(const RGBImage& img, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(img.size() * 3);
  for (const Rgb& p : img.pixels()) {
    bytes.push_back(p.r);
    bytes.push_back(p.g);
    bytes.push_back(p.b);
  }
  write_bytes(path, img.width(), img.height(), 3, bytes);
}

}  // namespace vesseltrace
