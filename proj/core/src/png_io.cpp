#include "nseg/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <memory>
#include <string>

#include "nseg/error.hpp"

namespace nseg {

namespace {

struct ErrorSink {
  char message[256] = "unknown libpng error";
};

void on_error(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  if (sink != nullptr && msg != nullptr) {
    std::strncpy(sink->message, msg, sizeof(sink->message) - 1);
    sink->message[sizeof(sink->message) - 1] = '\0';
  }
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw DataError("cannot open '" + path.string() + "'");
  return f;
}

class ReadHandle {
 public:
  ReadHandle() {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink_, on_error, on_warning);
    if (png_ != nullptr) info_ = png_create_info_struct(png_);
    if (png_ == nullptr || info_ == nullptr) throw DataError("libpng initialization failed");
  }
  ~ReadHandle() { png_destroy_read_struct(&png_, &info_, nullptr); }
  ReadHandle(const ReadHandle&) = delete;
  ReadHandle& operator=(const ReadHandle&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }
  const char* message() const { return sink_.message; }

 private:
  ErrorSink sink_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class WriteHandle {
 public:
  WriteHandle() {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink_, on_error, on_warning);
    if (png_ != nullptr) info_ = png_create_info_struct(png_);
    if (png_ == nullptr || info_ == nullptr) throw DataError("libpng initialization failed");
  }
  ~WriteHandle() { png_destroy_write_struct(&png_, &info_); }
  WriteHandle(const WriteHandle&) = delete;
  WriteHandle& operator=(const WriteHandle&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }
  const char* message() const { return sink_.message; }

 private:
  ErrorSink sink_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

// The setjmp frames below hold only trivially destructible locals.

bool read_all(png_structp png, png_infop info, std::FILE* fp, int transforms) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_png(png, info, transforms, nullptr);
  return true;
}

bool read_header(png_structp png, png_infop info, std::FILE* fp) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_info(png, info);
  return true;
}

bool write_all(png_structp png, png_infop info, std::FILE* fp, png_bytepp rows, png_uint_32 w,
               png_uint_32 h, int color_type) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 6);
  png_set_rows(png, info, rows);
  png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
  return true;
}

ImagePlane decode(const std::filesystem::path& path, bool keep_palette_indices) {
  FilePtr fp = open_file(path, "rb");
  png_byte signature[8] = {};
  if (std::fread(signature, 1, 8, fp.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw DataError("'" + path.string() + "' is not a PNG file");
  }
  std::rewind(fp.get());

  ReadHandle handle;
  int transforms = PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_PACKING;
  if (!keep_palette_indices) transforms |= PNG_TRANSFORM_EXPAND;
  if (!read_all(handle.png(), handle.info(), fp.get(), transforms)) {
    throw DataError("cannot decode '" + path.string() + "': " + handle.message());
  }

  const auto w = png_get_image_width(handle.png(), handle.info());
  const auto h = png_get_image_height(handle.png(), handle.info());
  const int channels = png_get_channels(handle.png(), handle.info());
  if (w == 0 || h == 0 || channels < 1 || channels > 4) {
    throw DataError("unsupported PNG layout in '" + path.string() + "'");
  }
  ImagePlane image(static_cast<int>(w), static_cast<int>(h), channels);
  png_bytepp rows = png_get_rows(handle.png(), handle.info());
  const std::size_t row_bytes = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels);
  for (png_uint_32 y = 0; y < h; ++y) {
    std::memcpy(image.samples.data() + y * row_bytes, rows[y], row_bytes);
  }
  return image;
}

}  // namespace

ImagePlane read_png(const std::filesystem::path& path) { return decode(path, false); }

ImagePlane read_png_indices(const std::filesystem::path& path) { return decode(path, true); }

std::pair<int, int> png_dimensions(const std::filesystem::path& path) {
  FilePtr fp = open_file(path, "rb");
  ReadHandle handle;
  if (!read_header(handle.png(), handle.info(), fp.get())) {
    throw DataError("cannot read PNG header of '" + path.string() + "': " + handle.message());
  }
  return {static_cast<int>(png_get_image_width(handle.png(), handle.info())),
          static_cast<int>(png_get_image_height(handle.png(), handle.info()))};
}

void write_png(const std::filesystem::path& path, const ImagePlane& image) {
  int color_type = 0;
  switch (image.channels) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGBA; break;
    default: throw InvalidInput("cannot encode an image with " + std::to_string(image.channels) +
                                " channels as PNG");
  }
  const std::size_t row_bytes =
      static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.channels);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  auto* base = const_cast<png_bytep>(image.samples.data());
  for (std::size_t y = 0; y < rows.size(); ++y) rows[y] = base + y * row_bytes;

  FilePtr fp = open_file(path, "wb");
  WriteHandle handle;
  if (!write_all(handle.png(), handle.info(), fp.get(), rows.data(),
                 static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height),
                 color_type)) {
    throw DataError("cannot encode '" + path.string() + "': " + handle.message());
  }
  if (std::fflush(fp.get()) != 0) throw DataError("cannot write '" + path.string() + "'");
}

void write_png(const std::filesystem::path& path, const LabelMask& mask) {
  ImagePlane plane;
  plane.width = mask.width;
  plane.height = mask.height;
  plane.channels = 1;
  plane.samples = mask.values;
  write_png(path, plane);
}

}  // namespace nseg
