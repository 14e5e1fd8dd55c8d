#include "net2rdm/npy.hpp"

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <string_view>

#include "net2rdm/error.hpp"

namespace net2rdm {

static_assert(std::endian::native == std::endian::little, "NPY payloads are read as native little-endian");

namespace {

constexpr unsigned char kMagic[6] = {0x93, 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kPreamble = 10;  // magic + version + header length

// Minimal reader for the Python-literal dictionary in an NPY header.
class HeaderParser {
 public:
  explicit HeaderParser(std::string_view text) : text_(text) {}

  struct Fields {
    std::optional<std::string> descr;
    std::optional<bool> fortran_order;
    std::optional<std::vector<std::size_t>> shape;
  };

  Fields parse() {
    Fields f;
    expect('{');
    skip_ws();
    while (peek() != '}') {
      const std::string key = parse_string();
      expect(':');
      if (key == "descr") {
        f.descr = parse_string();
      } else if (key == "fortran_order") {
        f.fortran_order = parse_bool();
      } else if (key == "shape") {
        f.shape = parse_tuple();
      } else {
        bad("unexpected key '" + key + "'");
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
      } else if (peek() != '}') {
        bad("expected ',' or '}'");
      }
    }
    ++pos_;
    skip_ws();
    if (pos_ != text_.size()) bad("trailing characters after dictionary");
    return f;
  }

 private:
  [[noreturn]] void bad(const std::string& what) const {
    fail(ErrorCode::BadMagic, "malformed NPY header: " + what);
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    if (pos_ >= text_.size()) bad("unexpected end of header");
    return text_[pos_];
  }
  void expect(char c) {
    if (peek() != c) bad(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string parse_string() {
    const char quote = peek();
    if (quote != '\'' && quote != '"') bad("expected a quoted string");
    const auto end = text_.find(quote, pos_ + 1);
    if (end == std::string_view::npos) bad("unterminated string");
    std::string s(text_.substr(pos_ + 1, end - pos_ - 1));
    pos_ = end + 1;
    return s;
  }
  bool parse_bool() {
    skip_ws();
    if (text_.substr(pos_, 4) == "True") {
      pos_ += 4;
      return true;
    }
    if (text_.substr(pos_, 5) == "False") {
      pos_ += 5;
      return false;
    }
    bad("expected True or False");
  }
  std::vector<std::size_t> parse_tuple() {
    expect('(');
    std::vector<std::size_t> dims;
    while (peek() != ')') {
      std::size_t v = 0;
      bool any = false;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        v = v * 10 + static_cast<std::size_t>(text_[pos_] - '0');
        ++pos_;
        any = true;
      }
      if (!any) bad("expected a dimension");
      dims.push_back(v);
      if (peek() == ',') ++pos_;
      else if (peek() != ')') bad("expected ',' or ')' in shape");
    }
    ++pos_;
    return dims;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::size_t element_size(NpyDtype dtype) { return dtype == NpyDtype::f4 ? 4 : 8; }

std::size_t product(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_literal(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  if (shape.size() == 1) s += ",";
  s += ")";
  return s;
}

}  // namespace

std::size_t NpyArray::element_count() const noexcept { return product(shape); }

NpyArray parse_npy(std::span<const std::byte> bytes) {
  if (bytes.size() < kPreamble || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    fail(ErrorCode::BadMagic, "not an NPY file (bad magic)");
  }
  const auto major = std::to_integer<unsigned>(bytes[6]);
  const auto minor = std::to_integer<unsigned>(bytes[7]);
  if (major != 1 || minor != 0) {
    fail(ErrorCode::BadMagic, "unsupported NPY version " + std::to_string(major) + "." + std::to_string(minor));
  }
  const std::size_t header_len =
      std::to_integer<std::size_t>(bytes[8]) | (std::to_integer<std::size_t>(bytes[9]) << 8);
  if (bytes.size() < kPreamble + header_len) fail(ErrorCode::TruncatedPayload, "NPY header is truncated");

  const std::string_view header(reinterpret_cast<const char*>(bytes.data()) + kPreamble, header_len);
  const auto fields = HeaderParser(header).parse();
  if (!fields.descr || !fields.fortran_order || !fields.shape) {
    fail(ErrorCode::BadMagic, "NPY header lacks descr, fortran_order or shape");
  }

  NpyArray out;
  if (*fields.descr == "<f8") {
    out.dtype = NpyDtype::f8;
  } else if (*fields.descr == "<f4") {
    out.dtype = NpyDtype::f4;
  } else {
    fail(ErrorCode::UnsupportedDescr, "unsupported NPY dtype '" + *fields.descr + "' (need '<f4' or '<f8')");
  }
  if (*fields.fortran_order) fail(ErrorCode::FortranOrderUnsupported, "Fortran-ordered NPY arrays are not supported");
  if (fields.shape->empty() || fields.shape->size() > 3) {
    fail(ErrorCode::UnsupportedShape, "NPY arrays must have 1 to 3 dimensions, got " +
                                          std::to_string(fields.shape->size()));
  }
  out.shape = *fields.shape;

  const std::size_t count = product(out.shape);
  const std::size_t payload = bytes.size() - kPreamble - header_len;
  if (payload != count * element_size(out.dtype)) {
    fail(ErrorCode::TruncatedPayload, "NPY payload has " + std::to_string(payload) + " bytes, expected " +
                                          std::to_string(count * element_size(out.dtype)));
  }
  const std::byte* src = bytes.data() + kPreamble + header_len;
  out.data.resize(count);
  if (out.dtype == NpyDtype::f8) {
    std::memcpy(out.data.data(), src, count * 8);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float f;
      std::memcpy(&f, src + 4 * i, 4);
      out.data[i] = static_cast<double>(f);
    }
  }
  return out;
}

NpyArray read_npy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_npy(std::as_bytes(std::span<const char>(raw)));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::byte> serialize_npy(std::span<const std::size_t> shape, std::span<const double> data,
                                     NpyDtype dtype) {
  if (shape.empty() || shape.size() > 3) {
    fail(ErrorCode::UnsupportedShape, "NPY output must have 1 to 3 dimensions, got " + std::to_string(shape.size()));
  }
  if (product(shape) != data.size()) {
    fail(ErrorCode::ShapeMismatch, "shape holds " + std::to_string(product(shape)) + " elements but " +
                                       std::to_string(data.size()) + " were given");
  }
  std::string header = std::string("{'descr': '") + (dtype == NpyDtype::f8 ? "<f8" : "<f4") +
                       "', 'fortran_order': False, 'shape': " + shape_literal(shape) + ", }";
  const std::size_t unpadded = kPreamble + header.size() + 1;  // + '\n'
  header.append((64 - unpadded % 64) % 64, ' ');
  header.push_back('\n');

  std::vector<std::byte> out;
  out.reserve(kPreamble + header.size() + data.size() * element_size(dtype));
  for (unsigned char c : kMagic) out.push_back(std::byte{c});
  out.push_back(std::byte{1});
  out.push_back(std::byte{0});
  out.push_back(static_cast<std::byte>(header.size() & 0xFF));
  out.push_back(static_cast<std::byte>((header.size() >> 8) & 0xFF));
  for (char c : header) out.push_back(static_cast<std::byte>(c));

  const std::size_t start = out.size();
  out.resize(start + data.size() * element_size(dtype));
  if (dtype == NpyDtype::f8) {
    if (!data.empty()) std::memcpy(out.data() + start, data.data(), data.size() * 8);
  } else {
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto f = static_cast<float>(data[i]);
      std::memcpy(out.data() + start + 4 * i, &f, 4);
    }
  }
  return out;
}

void write_npy(const std::filesystem::path& path, std::span<const std::size_t> shape, std::span<const double> data,
               NpyDtype dtype) {
  const auto bytes = serialize_npy(shape, data, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path.string() + "'");
}

void write_npy(const std::filesystem::path& path, const Matrix& matrix) {
  const std::size_t shape[2] = {matrix.rows(), matrix.cols()};
  write_npy(path, shape, matrix.data());
}

Matrix npy_as_matrix(const NpyArray& array) {
  const std::size_t rows = array.shape.at(0);
  std::size_t cols = 1;
  for (std::size_t i = 1; i < array.shape.size(); ++i) cols *= array.shape[i];
  return Matrix(rows, cols, array.data);
}

}  // namespace net2rdm
