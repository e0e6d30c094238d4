#include "sscaudit/image.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "sscaudit/errors.hpp"

namespace ssc {

void Image::fill_rect(int x0, int y0, int w, int h, std::uint8_t v) {
  for (int y = y0; y < y0 + h; ++y) {
    std::memset(pixels.data() + static_cast<std::size_t>(y) * width + x0, v,
                static_cast<std::size_t>(w));
  }
}

Image crop(const Image& img, int x0, int y0, int w, int h) {
  Image out(w, h, 0);
  for (int y = 0; y < h; ++y) {
    std::memcpy(out.pixels.data() + static_cast<std::size_t>(y) * w,
                img.pixels.data() + static_cast<std::size_t>(y0 + y) * img.width + x0,
                static_cast<std::size_t>(w));
  }
  return out;
}

void blit(Image& dst, const Image& src, int x0, int y0) {
  for (int y = 0; y < src.height; ++y) {
    std::memcpy(dst.pixels.data() + static_cast<std::size_t>(y0 + y) * dst.width + x0,
                src.pixels.data() + static_cast<std::size_t>(y) * src.width,
                static_cast<std::size_t>(src.width));
  }
}

namespace {

// ---- checksums ----

std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t n = 0; n < 256; ++n) {
      std::uint32_t c = n;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[n] = c;
    }
    return t;
  }();
  crc ^= 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

std::uint32_t adler32(const std::uint8_t* data, std::size_t len) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < len; ++i) {
    a = (a + data[i]) % 65521;
    b = (b + a) % 65521;
  }
  return (b << 16) | a;
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void write_chunk(std::vector<std::uint8_t>& out, const char type[4],
                 const std::vector<std::uint8_t>& data) {
  put_be32(out, static_cast<std::uint32_t>(data.size()));
  std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  std::uint32_t crc = crc32(out.data() + type_pos, 4 + data.size());
  put_be32(out, crc);
}

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};

// ---- inflate (RFC 1951) ----

struct BitReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;
  int bitpos = 0;

  int bit() {
    if (pos >= size) throw PngError("deflate stream truncated");
    int b = (data[pos] >> bitpos) & 1;
    if (++bitpos == 8) {
      bitpos = 0;
      ++pos;
    }
    return b;
  }
  std::uint32_t bits(int n) {
    std::uint32_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint32_t>(bit()) << i;
    return v;
  }
  void align_byte() {
    if (bitpos != 0) {
      bitpos = 0;
      ++pos;
    }
  }
};

struct Huffman {
  std::array<int, 16> counts{};
  std::vector<int> symbols;

  static Huffman build(const std::vector<int>& lengths) {
    Huffman h;
    for (int l : lengths) {
      if (l > 0) h.counts[l]++;
    }
    std::array<int, 16> offsets{};
    int total = 0;
    for (int l = 1; l <= 15; ++l) {
      offsets[l] = total;
      total += h.counts[l];
    }
    h.symbols.resize(total);
    for (std::size_t sym = 0; sym < lengths.size(); ++sym) {
      if (lengths[sym] > 0) h.symbols[offsets[lengths[sym]]++] = static_cast<int>(sym);
    }
    return h;
  }
};

int decode_symbol(BitReader& br, const Huffman& h) {
  int code = 0, first = 0, index = 0;
  for (int len = 1; len <= 15; ++len) {
    code |= br.bit();
    int count = h.counts[len];
    if (code - first < count) return h.symbols[index + (code - first)];
    index += count;
    first = (first + count) << 1;
    code <<= 1;
  }
  throw PngError("invalid huffman code");
}

constexpr int kLenBase[29] = {3,  4,  5,  6,  7,  8,  9,  10, 11,  13,  15,  17,  19, 23, 27,
                              31, 35, 43, 51, 59, 67, 83, 99, 115, 131, 163, 195, 227, 258};
constexpr int kLenExtra[29] = {0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2,
                               2, 3, 3, 3, 3, 4, 4, 4, 4, 5, 5, 5, 5, 0};
constexpr int kDistBase[30] = {1,    2,    3,    4,    5,    7,     9,     13,   17,   25,
                               33,   49,   65,   97,   129,  193,   257,   385,  513,  769,
                               1025, 1537, 2049, 3073, 4097, 6145,  8193,  12289, 16385, 24577};
constexpr int kDistExtra[30] = {0, 0, 0, 0, 1, 1, 2, 2,  3,  3,  4,  4,  5,  5,  6,
                                6, 7, 7, 8, 8, 9, 9, 10, 10, 11, 11, 12, 12, 13, 13};

void inflate_block_data(BitReader& br, const Huffman& litlen, const Huffman& dist,
                        std::vector<std::uint8_t>& out) {
  for (;;) {
    int sym = decode_symbol(br, litlen);
    if (sym < 256) {
      out.push_back(static_cast<std::uint8_t>(sym));
    } else if (sym == 256) {
      return;
    } else {
      sym -= 257;
      if (sym >= 29) throw PngError("invalid length symbol");
      int length = kLenBase[sym] + static_cast<int>(br.bits(kLenExtra[sym]));
      int dsym = decode_symbol(br, dist);
      if (dsym >= 30) throw PngError("invalid distance symbol");
      std::size_t distance = kDistBase[dsym] + br.bits(kDistExtra[dsym]);
      if (distance > out.size()) throw PngError("distance beyond output");
      std::size_t from = out.size() - distance;
      for (int i = 0; i < length; ++i) out.push_back(out[from + i]);
    }
  }
}

std::vector<std::uint8_t> inflate(const std::uint8_t* data, std::size_t size) {
  BitReader br{data, size};
  std::vector<std::uint8_t> out;
  for (;;) {
    int final = br.bit();
    int type = static_cast<int>(br.bits(2));
    if (type == 0) {
      br.align_byte();
      if (br.pos + 4 > br.size) throw PngError("stored block truncated");
      std::uint32_t len = data[br.pos] | (data[br.pos + 1] << 8);
      std::uint32_t nlen = data[br.pos + 2] | (data[br.pos + 3] << 8);
      if (len != (~nlen & 0xffffu)) throw PngError("stored block length mismatch");
      br.pos += 4;
      if (br.pos + len > br.size) throw PngError("stored block truncated");
      out.insert(out.end(), data + br.pos, data + br.pos + len);
      br.pos += len;
    } else if (type == 1) {
      std::vector<int> ll(288);
      for (int i = 0; i < 144; ++i) ll[i] = 8;
      for (int i = 144; i < 256; ++i) ll[i] = 9;
      for (int i = 256; i < 280; ++i) ll[i] = 7;
      for (int i = 280; i < 288; ++i) ll[i] = 8;
      std::vector<int> dl(30, 5);
      inflate_block_data(br, Huffman::build(ll), Huffman::build(dl), out);
    } else if (type == 2) {
      int hlit = static_cast<int>(br.bits(5)) + 257;
      int hdist = static_cast<int>(br.bits(5)) + 1;
      int hclen = static_cast<int>(br.bits(4)) + 4;
      static constexpr int order[19] = {16, 17, 18, 0, 8,  7, 9,  6, 10, 5,
                                        11, 4,  12, 3, 13, 2, 14, 1, 15};
      std::vector<int> clen(19, 0);
      for (int i = 0; i < hclen; ++i) clen[order[i]] = static_cast<int>(br.bits(3));
      Huffman ctree = Huffman::build(clen);
      std::vector<int> lengths;
      lengths.reserve(hlit + hdist);
      while (static_cast<int>(lengths.size()) < hlit + hdist) {
        int sym = decode_symbol(br, ctree);
        if (sym < 16) {
          lengths.push_back(sym);
        } else if (sym == 16) {
          if (lengths.empty()) throw PngError("repeat with no previous length");
          int rep = 3 + static_cast<int>(br.bits(2));
          lengths.insert(lengths.end(), rep, lengths.back());
        } else if (sym == 17) {
          int rep = 3 + static_cast<int>(br.bits(3));
          lengths.insert(lengths.end(), rep, 0);
        } else {
          int rep = 11 + static_cast<int>(br.bits(7));
          lengths.insert(lengths.end(), rep, 0);
        }
      }
      if (static_cast<int>(lengths.size()) != hlit + hdist)
        throw PngError("code length overflow");
      std::vector<int> ll(lengths.begin(), lengths.begin() + hlit);
      std::vector<int> dl(lengths.begin() + hlit, lengths.end());
      inflate_block_data(br, Huffman::build(ll), Huffman::build(dl), out);
    } else {
      throw PngError("invalid deflate block type");
    }
    if (final) break;
  }
  return out;
}

int paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& img) {
  if (img.width <= 0 || img.height <= 0) throw PngError("cannot encode empty image");
  if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height)
    throw PngError("pixel buffer size mismatch");

  // filter type 0 on every scanline
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (img.width + 1));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = img.pixels.data() + static_cast<std::size_t>(y) * img.width;
    raw.insert(raw.end(), row, row + img.width);
  }

  // zlib wrapper with stored deflate blocks
  std::vector<std::uint8_t> z;
  z.reserve(raw.size() + raw.size() / 65535 * 5 + 16);
  z.push_back(0x78);
  z.push_back(0x01);
  std::size_t pos = 0;
  do {
    std::size_t n = std::min<std::size_t>(65535, raw.size() - pos);
    bool final = pos + n == raw.size();
    z.push_back(final ? 1 : 0);
    z.push_back(static_cast<std::uint8_t>(n & 0xff));
    z.push_back(static_cast<std::uint8_t>(n >> 8));
    z.push_back(static_cast<std::uint8_t>(~n & 0xff));
    z.push_back(static_cast<std::uint8_t>((~n >> 8) & 0xff));
    z.insert(z.end(), raw.begin() + pos, raw.begin() + pos + n);
    pos += n;
  } while (pos < raw.size());
  put_be32(z, adler32(raw.data(), raw.size()));

  std::vector<std::uint8_t> out(kSignature, kSignature + 8);
  std::vector<std::uint8_t> ihdr;
  put_be32(ihdr, static_cast<std::uint32_t>(img.width));
  put_be32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  write_chunk(out, "IHDR", ihdr);
  write_chunk(out, "IDAT", z);
  write_chunk(out, "IEND", {});
  return out;
}

Image decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kSignature, 8) != 0)
    throw PngError("not a PNG file");

  std::size_t pos = 8;
  std::uint32_t width = 0, height = 0;
  bool have_ihdr = false;
  bool have_iend = false;
  std::vector<std::uint8_t> idat;
  while (pos + 8 <= bytes.size()) {
    std::uint32_t len = (bytes[pos] << 24) | (bytes[pos + 1] << 16) | (bytes[pos + 2] << 8) |
                        bytes[pos + 3];
    if (pos + 12 + len > bytes.size()) throw PngError("truncated chunk");
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const std::uint8_t* data = bytes.data() + pos + 8;
    std::uint32_t expect = crc32(bytes.data() + pos + 4, 4 + len);
    std::uint32_t stored = (data[len] << 24) | (data[len + 1] << 16) | (data[len + 2] << 8) |
                           data[len + 3];
    if (expect != stored) throw PngError("chunk crc mismatch");
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) throw PngError("bad IHDR");
      width = (data[0] << 24) | (data[1] << 16) | (data[2] << 8) | data[3];
      height = (data[4] << 24) | (data[5] << 16) | (data[6] << 8) | data[7];
      if (data[8] != 8 || data[9] != 0) throw PngError("only 8-bit grayscale supported");
      if (data[10] != 0 || data[11] != 0) throw PngError("bad compression/filter method");
      if (data[12] != 0) throw PngError("interlaced PNG not supported");
      have_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      have_iend = true;
      break;
    }
    pos += 12 + len;
  }
  if (!have_ihdr) throw PngError("missing IHDR");
  if (!have_iend) throw PngError("missing IEND");
  if (width == 0 || height == 0) throw PngError("zero-dimension image");
  if (idat.size() < 6) throw PngError("missing image data");

  // zlib wrapper
  if ((idat[0] & 0x0f) != 8) throw PngError("unsupported compression method");
  if (((idat[0] << 8) | idat[1]) % 31 != 0) throw PngError("bad zlib header check");
  if (idat[1] & 0x20) throw PngError("preset dictionary not supported");
  std::vector<std::uint8_t> raw = inflate(idat.data() + 2, idat.size() - 6);
  std::uint32_t adler_stored = (idat[idat.size() - 4] << 24) | (idat[idat.size() - 3] << 16) |
                               (idat[idat.size() - 2] << 8) | idat[idat.size() - 1];
  if (adler32(raw.data(), raw.size()) != adler_stored) throw PngError("adler32 mismatch");

  std::size_t stride = width + 1;
  if (raw.size() != stride * height) throw PngError("scanline data size mismatch");

  Image img(static_cast<int>(width), static_cast<int>(height), 0);
  for (std::uint32_t y = 0; y < height; ++y) {
    const std::uint8_t* src = raw.data() + y * stride;
    std::uint8_t* dst = img.pixels.data() + static_cast<std::size_t>(y) * width;
    const std::uint8_t* up = y > 0 ? dst - width : nullptr;
    int filter = src[0];
    for (std::uint32_t x = 0; x < width; ++x) {
      int a = x > 0 ? dst[x - 1] : 0;
      int b = up ? up[x] : 0;
      int c = (x > 0 && up) ? up[x - 1] : 0;
      int v = src[x + 1];
      switch (filter) {
        case 0: break;
        case 1: v += a; break;
        case 2: v += b; break;
        case 3: v += (a + b) / 2; break;
        case 4: v += paeth(a, b, c); break;
        default: throw PngError("unknown scanline filter");
      }
      dst[x] = static_cast<std::uint8_t>(v & 0xff);
    }
  }
  return img;
}

void save_png(const std::filesystem::path& path, const Image& img) {
  auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PngError("cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PngError("write failed: " + path.string());
}

Image load_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PngError("cannot open: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_png(bytes);
}

}  // namespace ssc
