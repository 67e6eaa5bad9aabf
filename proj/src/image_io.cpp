#include "waterfill/image_io.hpp"

#include <cerrno>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "waterfill/errors.hpp"

namespace waterfill {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_for_read(const std::filesystem::path& path) {
    FilePtr f(std::fopen(path.string().c_str(), "rb"));
    if (!f) {
        if (errno == ENOENT || errno == ENOTDIR)
            throw FileNotFound("no such file: " + path.string());
        throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    }
    return f;
}

void check_dims(unsigned width, unsigned height, const std::filesystem::path& path) {
    if (width < 3 || height < 3)
        throw ImageTooSmall(path.string() + " is smaller than 3x3");
}

RgbImage load_png(const std::filesystem::path& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.string().c_str()))
        throw UnsupportedFormat("PNG decode failed for " + path.string() + ": " + png.message);
    const unsigned w = png.width;
    const unsigned h = png.height;
    if (w < 3 || h < 3) {
        png_image_free(&png);
        check_dims(w, h, path);
    }
    png.format = PNG_FORMAT_RGB;
    RgbImage out(static_cast<int>(w), static_cast<int>(h));
    // Alpha (if any) is composited over opaque white by libpng.
    png_color white{255, 255, 255};
    if (!png_image_finish_read(&png, &white, out.bytes().data(), 0, nullptr)) {
        std::string msg = png.message;
        png_image_free(&png);
        throw UnsupportedFormat("PNG decode failed for " + path.string() + ": " + msg);
    }
    return out;
}

// libjpeg reports fatal errors through a callback; route them into a
// longjmp so the decoder state can be torn down and rethrown as our type.
struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

RgbImage load_jpeg(const std::filesystem::path& path) {
    FilePtr f = open_for_read(path);
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw UnsupportedFormat("JPEG decode failed for " + path.string() + ": " + jerr.message);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, f.get());
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    if (cinfo.output_width < 3 || cinfo.output_height < 3) {
        jpeg_destroy_decompress(&cinfo);
        check_dims(0, 0, path);
    }
    RgbImage out(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
    const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.bytes().data() + static_cast<std::size_t>(cinfo.output_scanline) * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return out;
}

} // namespace

RgbImage load_image(const std::filesystem::path& path) {
    unsigned char magic[4] = {0, 0, 0, 0};
    {
        FilePtr f = open_for_read(path);
        if (std::fread(magic, 1, sizeof(magic), f.get()) != sizeof(magic))
            throw UnsupportedFormat(path.string() + " is too short to carry an image signature");
    }
    if (magic[0] == 0x89 && magic[1] == 'P' && magic[2] == 'N' && magic[3] == 'G')
        return load_png(path);
    if (magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF)
        return load_jpeg(path);
    throw UnsupportedFormat(path.string() + " is neither PNG nor JPEG");
}

void save_image(const RgbImage& image, const std::filesystem::path& path) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width());
    png.height = static_cast<png_uint_32>(image.height());
    png.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, image.bytes().data(), 0, nullptr))
        throw IoError("cannot write " + path.string() + ": " + png.message);
}

void save_grayscale(const ScalarField& field, const std::filesystem::path& path) {
    std::vector<std::uint8_t> gray(field.size());
    const double* src = field.values().data();
    for (std::size_t i = 0; i < gray.size(); ++i) {
        double v = std::floor(src[i] + 0.5);
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        gray[i] = static_cast<std::uint8_t>(v);
    }
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(field.width());
    png.height = static_cast<png_uint_32>(field.height());
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.string().c_str(), 0, gray.data(), 0, nullptr))
        throw IoError("cannot write " + path.string() + ": " + png.message);
}

} // namespace waterfill
