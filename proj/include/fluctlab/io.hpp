#ifndef FLUCTLAB_IO_HPP
#define FLUCTLAB_IO_HPP

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fl {

inline std::uint64_t fnv1a64(const void *data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const unsigned char *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(const std::string &s) {
  return fnv1a64(s.data(), s.size());
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::uint64_t hash_file(const std::string &path) {
  return fnv1a64(read_file(path));
}

inline void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

// Column-oriented CSV writer with full double round-trip precision, so rerun
// artifacts can be compared byte for byte.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(const std::vector<double> &row) {
    if (row.size() != header_.size())
      throw std::invalid_argument("csv row width mismatch");
    rows_.push_back(row);
  }

  std::string str() const {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < header_.size(); ++i)
      os << header_[i] << (i + 1 < header_.size() ? ',' : '\n');
    for (const auto &row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i)
        os << row[i] << (i + 1 < row.size() ? ',' : '\n');
    }
    return os.str();
  }

  void save(const std::string &path) const { write_file(path, str()); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace fl

#endif
