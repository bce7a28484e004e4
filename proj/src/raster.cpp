#include "scengraph/raster.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "scengraph/errors.hpp"

namespace scengraph::screen {

void ScreenRaster::fill_rect(const Rect& r, std::uint8_t v) {
  for (int y = std::max(0, r.y0); y < std::min(height, r.y1); ++y) {
    for (int x = std::max(0, r.x0); x < std::min(width, r.x1); ++x) {
      set(x, y, v);
    }
  }
}

void ScreenRaster::draw_border(const Rect& r, int thickness, std::uint8_t v) {
  fill_rect(Rect{r.x0, r.y0, r.x1, r.y0 + thickness}, v);
  fill_rect(Rect{r.x0, r.y1 - thickness, r.x1, r.y1}, v);
  fill_rect(Rect{r.x0, r.y0, r.x0 + thickness, r.y1}, v);
  fill_rect(Rect{r.x1 - thickness, r.y0, r.x1, r.y1}, v);
}

std::string to_pgm_string(const ScreenRaster& raster) {
  std::ostringstream out;
  out << "P2\n" << raster.width << " " << raster.height << "\n255\n";
  for (int y = 0; y < raster.height; ++y) {
    for (int x = 0; x < raster.width; ++x) {
      if (x) out << ' ';
      out << static_cast<int>(raster.at(x, y));
    }
    out << '\n';
  }
  return out.str();
}

ScreenRaster from_pgm_string(const std::string& content,
                             const std::string& origin) {
  std::istringstream in(content);
  std::string magic;
  in >> magic;
  if (magic != "P2") {
    throw CorpusFormatError(origin + ": not a plain portable graymap");
  }
  auto next_int = [&](const char* what) {
    // Skip whitespace and '#' comment lines between header fields.
    while (true) {
      int c = in.peek();
      if (c == EOF) throw CorpusFormatError(origin + ": truncated " + what);
      if (std::isspace(c)) {
        in.get();
        continue;
      }
      if (c == '#') {
        std::string junk;
        std::getline(in, junk);
        continue;
      }
      break;
    }
    long v = 0;
    if (!(in >> v)) throw CorpusFormatError(origin + ": bad " + what);
    return v;
  };
  long w = next_int("width");
  long h = next_int("height");
  long maxval = next_int("maxval");
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
    throw CorpusFormatError(origin + ": bad graymap header");
  }
  ScreenRaster raster(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < raster.pixels.size(); ++i) {
    long v = 0;
    if (!(in >> v) || v < 0 || v > maxval) {
      throw CorpusFormatError(origin + ": bad pixel data");
    }
    raster.pixels[i] = static_cast<std::uint8_t>(v);
  }
  return raster;
}

ScreenRaster read_pgm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusFormatError("cannot open raster " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_pgm_string(buf.str(), path);
}

void write_pgm(const ScreenRaster& raster, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write raster " + path);
  out << to_pgm_string(raster);
}

std::string to_text_layer_string(const std::vector<TextSpan>& spans) {
  std::ostringstream out;
  for (const auto& s : spans) {
    out << '"' << s.text << "\" " << s.box.x0 << ' ' << s.box.y0 << ' '
        << s.box.x1 << ' ' << s.box.y1 << '\n';
  }
  return out.str();
}

std::vector<TextSpan> from_text_layer_string(const std::string& content,
                                             const std::string& origin) {
  std::vector<TextSpan> spans;
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = origin + ":" + std::to_string(lineno);
    if (line.front() != '"') {
      throw CorpusFormatError(where + ": text layer line must start with '\"'");
    }
    std::size_t close = line.rfind('"');
    if (close == 0) {
      throw CorpusFormatError(where + ": unterminated string");
    }
    TextSpan span;
    span.text = line.substr(1, close - 1);
    std::istringstream rest(line.substr(close + 1));
    if (!(rest >> span.box.x0 >> span.box.y0 >> span.box.x1 >> span.box.y1)) {
      throw CorpusFormatError(where + ": expected four box coordinates");
    }
    spans.push_back(std::move(span));
  }
  return spans;
}

std::vector<TextSpan> read_text_layer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusFormatError("cannot open text layer " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text_layer_string(buf.str(), path);
}

void write_text_layer(const std::vector<TextSpan>& spans,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write text layer " + path);
  out << to_text_layer_string(spans);
}

}  // namespace scengraph::screen
