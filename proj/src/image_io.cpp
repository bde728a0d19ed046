#include "planesym/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>
#include <sstream>

namespace planesym {

std::string to_string(LatticeType t) {
  switch (t) {
    case LatticeType::oblique: return "oblique";
    case LatticeType::rectangular: return "rectangular";
    case LatticeType::centered: return "centered";
    case LatticeType::square: return "square";
    case LatticeType::hexagonal: return "hexagonal";
  }
  return "?";
}

RasterImage::RasterImage(int w, int h, double fill) : width(w), height(h) {
  if (w <= 0 || h <= 0)
    throw Error("image dimensions must be positive");
  pixels.assign(std::size_t(w) * h, fill);
}

void RegionSelection::check_fits(int width, int height) const {
  if (radius <= 0)
    throw Error("region radius must be positive");
  if (cx - radius < -0.5 || cy - radius < -0.5 || cx + radius > width - 0.5 ||
      cy + radius > height - 0.5)
    throw Error("region does not fit inside the image");
}

std::size_t RegionSelection::pixel_count(int width, int height) const {
  std::size_t n = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      n += contains(x, y);
  return n;
}

namespace {

bool has_suffix(const std::filesystem::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

double luma(double r, double g, double b) {
  return std::round(0.299 * r + 0.587 * g + 0.114 * b);
}

RasterImage read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw Error("cannot read PNG " + path.string() + ": " + img.message);
  // Read as 8-bit RGBA and apply the luma weights ourselves so that colour
  // reduction does not depend on libpng's gamma handling.
  img.format = PNG_FORMAT_RGBA;
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
    std::string msg = img.message;
    png_image_free(&img);
    throw Error("cannot decode PNG " + path.string() + ": " + msg);
  }
  RasterImage out(int(img.width), int(img.height));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const png_byte* p = &buf[4 * i];
    out.pixels[i] = (p[0] == p[1] && p[1] == p[2]) ? p[0] : luma(p[0], p[1], p[2]);
  }
  return out;
}

// PGM header tokens may be separated by comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty())
        return tok;
      continue;
    }
    tok += c;
  }
  return tok;
}

}  // namespace

RasterImage read_pgm(std::istream& in) {
  std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5")
    throw Error("not a PGM file (magic '" + magic + "')");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pgm_token(in));
    h = std::stoi(pgm_token(in));
    maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw Error("malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw Error("malformed PGM header");
  RasterImage out(w, h);
  double scale = 255.0 / maxval;
  if (magic == "P2") {
    for (double& v : out.pixels) {
      std::string t = pgm_token(in);
      if (t.empty())
        throw Error("truncated PGM data");
      v = std::stoi(t);
    }
  } else {
    int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(out.size() * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
    if (in.gcount() != std::streamsize(raw.size()))
      throw Error("truncated PGM data");
    for (std::size_t i = 0; i < out.size(); ++i)
      out.pixels[i] = bytes == 1 ? raw[i] : (raw[2 * i] << 8 | raw[2 * i + 1]);
  }
  if (maxval != 255)
    for (double& v : out.pixels)
      v = std::round(v * scale);
  return out;
}

RasterImage load_image(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot open " + path.string());
  char sig[2] = {0, 0};
  f.read(sig, 2);
  if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) {
    f.seekg(0);
    return read_pgm(f);
  }
  f.close();
  return read_png(path);
}

namespace {
unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::clamp(std::round(v), 0.0, 255.0));
}
}  // namespace

void save_png(const RasterImage& image, const std::filesystem::path& path) {
  std::vector<png_byte> buf(image.size());
  std::transform(image.pixels.begin(), image.pixels.end(), buf.begin(), to_byte);
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = png_uint_32(image.width);
  img.height = png_uint_32(image.height);
  img.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr))
    throw Error("cannot write PNG " + path.string() + ": " + img.message);
}

void save_pgm(const RasterImage& image, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw Error("cannot write " + path.string());
  f << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  std::vector<unsigned char> buf(image.size());
  std::transform(image.pixels.begin(), image.pixels.end(), buf.begin(), to_byte);
  f.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
}

void save_image(const RasterImage& image, const std::filesystem::path& path) {
  if (has_suffix(path, ".pgm"))
    save_pgm(image, path);
  else
    save_png(image, path);
}

Histogram compute_histogram(const RasterImage& image,
                            const std::optional<RegionSelection>& region) {
  Histogram hist;
  double sum = 0.0;
  hist.min = 1e300;
  hist.max = -1e300;
  std::vector<double> vals;
  vals.reserve(image.size());
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      if (region && !region->contains(x, y))
        continue;
      double v = image.at(x, y);
      vals.push_back(v);
      sum += v;
      hist.min = std::min(hist.min, v);
      hist.max = std::max(hist.max, v);
      hist.bins[to_byte(v)]++;
    }
  if (vals.empty())
    throw Error("histogram of an empty region");
  hist.count = vals.size();
  hist.mean = sum / double(hist.count);
  double ss = 0.0, sa = 0.0;
  for (double v : vals) {
    ss += (v - hist.mean) * (v - hist.mean);
    sa += std::abs(v - hist.mean);
  }
  hist.rms = std::sqrt(ss / double(hist.count));
  hist.mad = sa / double(hist.count);
  hist.fwid = hist.max - hist.min;
  hist.mode_count = *std::max_element(hist.bins.begin(), hist.bins.end());
  return hist;
}

std::vector<HkaRecord> parse_hka(std::istream& in) {
  std::vector<HkaRecord> out;
  std::map<std::pair<int, int>, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::istringstream ls(line);
    HkaRecord r;
    if (!(ls >> r.h >> r.k >> r.amplitude >> r.phase))
      continue;  // header or other non-numeric line
    auto [it, fresh] = seen.emplace(std::make_pair(r.h, r.k), lineno);
    if (!fresh)
      throw Error("duplicate index (" + std::to_string(r.h) + "," + std::to_string(r.k) +
                  ") at line " + std::to_string(lineno) + ", first seen at line " +
                  std::to_string(it->second));
    out.push_back(r);
  }
  return out;
}

std::vector<HkaRecord> read_hka(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f)
    throw Error("cannot open " + path.string());
  return parse_hka(f);
}

void write_hka(std::ostream& out, std::vector<HkaRecord> records) {
  std::sort(records.begin(), records.end(), [](const HkaRecord& a, const HkaRecord& b) {
    return std::tie(a.h, a.k) < std::tie(b.h, b.k);
  });
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%d %d %.4f %.4f\n", r.h, r.k, r.amplitude, r.phase);
    out << buf;
  }
}

void write_hka(const std::filesystem::path& path, std::vector<HkaRecord> records) {
  std::ofstream f(path);
  if (!f)
    throw Error("cannot write " + path.string());
  write_hka(f, std::move(records));
}

}  // namespace planesym
