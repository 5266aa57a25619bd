#include "avsal/map_io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace avsal {
namespace {

constexpr char kSmfMagic[4] = {'S', 'M', 'F', '1'};

void put_u32le(std::ostream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw Error(Errc::truncated_file, "truncated SMF header");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_f32le(std::ostream& out, float v) {
  static_assert(sizeof(float) == 4);
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32le(out, bits);
}

float get_f32le(std::istream& in) {
  uint32_t bits = get_u32le(in);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

void write_smf(const SaliencyMap& map, std::ostream& out) {
  validate_map(map);
  out.write(kSmfMagic, 4);
  put_u32le(out, static_cast<uint32_t>(map.height));
  put_u32le(out, static_cast<uint32_t>(map.width));
  for (double v : map.values) put_f32le(out, static_cast<float>(v));
}

SaliencyMap read_smf(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kSmfMagic, 4) != 0) {
    throw Error(Errc::bad_format, "bad SMF magic");
  }
  uint32_t h = get_u32le(in);
  uint32_t w = get_u32le(in);
  if (h < 1 || w < 1 || static_cast<uint64_t>(h) * w > (1ull << 30)) {
    throw Error(Errc::bad_format, "implausible SMF dimensions");
  }
  SaliencyMap map(static_cast<int>(h), static_cast<int>(w));
  for (double& v : map.values) {
    if (in.peek() == EOF) throw Error(Errc::truncated_file, "truncated SMF payload");
    float f = get_f32le(in);
    if (!std::isfinite(f)) throw Error(Errc::invalid_value, "non-finite value in SMF payload");
    if (f < 0.0f) throw Error(Errc::invalid_value, "negative value in SMF payload");
    v = static_cast<double>(f);
  }
  return map;
}

namespace {

void write_pgm(const SaliencyMap& map, std::ostream& out) {
  validate_map(map);
  double lo = map.values[0], hi = map.values[0];
  for (double v : map.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out << "P5\n" << map.width << " " << map.height << "\n255\n";
  // Zero-range maps export as all-zero.
  double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  for (double v : map.values) {
    int q = round_half_up((v - lo) * scale);
    q = std::clamp(q, 0, 255);
    out.put(static_cast<char>(static_cast<unsigned char>(q)));
  }
}

SaliencyMap read_pgm(std::istream& in) {
  std::string magic;
  in >> magic;
  if (magic != "P5") throw Error(Errc::bad_format, "not a binary PGM (P5) file");
  auto next_int = [&in]() {
    // PGM allows '#' comments between header tokens.
    while (true) {
      int c = in.peek();
      if (c == EOF) throw Error(Errc::truncated_file, "truncated PGM header");
      if (std::isspace(c)) {
        in.get();
      } else if (c == '#') {
        std::string skip;
        std::getline(in, skip);
      } else {
        break;
      }
    }
    long v = 0;
    in >> v;
    if (!in) throw Error(Errc::bad_format, "bad PGM header token");
    return v;
  };
  long w = next_int();
  long h = next_int();
  long maxval = next_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) {
    throw Error(Errc::bad_format, "unsupported PGM header");
  }
  in.get();  // single whitespace after maxval
  SaliencyMap map(static_cast<int>(h), static_cast<int>(w));
  std::vector<char> buf(map.size());
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw Error(Errc::truncated_file, "truncated PGM payload");
  }
  for (size_t i = 0; i < buf.size(); ++i) {
    map.values[i] = static_cast<double>(static_cast<unsigned char>(buf[i]));
  }
  return map;
}

}  // namespace

void write_map(const SaliencyMap& map, const std::filesystem::path& path, MapFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  if (format == MapFormat::SMF) {
    write_smf(map, out);
  } else {
    write_pgm(map, out);
  }
  out.flush();
  if (!out) throw Error(Errc::io_error, "write failed: " + path.string());
}

SaliencyMap read_map(const std::filesystem::path& path, MapFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  return format == MapFormat::SMF ? read_smf(in) : read_pgm(in);
}

namespace {

MapFormat format_from_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".smf") return MapFormat::SMF;
  if (ext == ".pgm") return MapFormat::PGM;
  throw Error(Errc::bad_format, "unknown map extension: " + ext);
}

}  // namespace

SaliencyMap read_map(const std::filesystem::path& path) {
  return read_map(path, format_from_extension(path));
}

void write_map(const SaliencyMap& map, const std::filesystem::path& path) {
  write_map(map, path, format_from_extension(path));
}

FixationSet read_fixation_csv(const std::filesystem::path& path, int height, int width) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::truncated_file, "empty fixation CSV");
  auto header = split_csv_line(line);
  const std::vector<std::string> expect = {"video_id", "frame_idx", "subject_id", "x", "y"};
  if (std::vector<std::string>(header.begin(), header.end()) != expect) {
    throw Error(Errc::bad_format, "bad fixation CSV header in " + path.string());
  }
  FixationSet set(height, width);
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) {
      throw Error(Errc::bad_format,
                  "bad fixation CSV row at line " + std::to_string(line_no));
    }
    FixationRecord rec;
    rec.video_id = f[0];
    rec.subject_id = f[2];
    try {
      rec.frame_idx = std::stoi(f[1]);
      // Sub-pixel gaze samples are rounded half-up at ingestion.
      rec.x = round_half_up(std::stod(f[3]));
      rec.y = round_half_up(std::stod(f[4]));
    } catch (const std::exception&) {
      throw Error(Errc::bad_format, "non-numeric field at line " + std::to_string(line_no));
    }
    set.add(rec);
  }
  return set;
}

void write_fixation_csv(const FixationSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out << "video_id,frame_idx,subject_id,x,y\n";
  for (const auto& r : set.records()) {
    out << r.video_id << ',' << r.frame_idx << ',' << r.subject_id << ',' << r.x << ',' << r.y
        << '\n';
  }
}

std::map<std::string, VideoCategory> read_category_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::truncated_file, "empty category CSV");
  auto header = split_csv_line(line);
  if (header.size() != 2 || header[0] != "video_id" || header[1] != "category") {
    throw Error(Errc::bad_format, "bad category CSV header in " + path.string());
  }
  std::map<std::string, VideoCategory> cats;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 2) throw Error(Errc::bad_format, "bad category CSV row: " + line);
    cats[f[0]] = category_from_token(f[1]);
  }
  return cats;
}

void write_category_csv(const std::map<std::string, VideoCategory>& cats,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out << "video_id,category\n";
  for (const auto& [id, cat] : cats) out << id << ',' << category_token(cat) << '\n';
}

void write_score_csv(const std::vector<ScoreRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out << "video_id,frame_idx,nss,auc_judd,sauc,cc,sim\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : records) {
    out << r.video_id << ',' << r.frame_idx << ',' << cell(r.nss) << ',' << cell(r.auc_judd) << ','
        << cell(r.sauc) << ',' << cell(r.cc) << ',' << cell(r.sim) << '\n';
  }
}

std::vector<ScoreRecord> read_score_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::truncated_file, "empty score CSV");
  auto header = split_csv_line(line);
  const std::vector<std::string> expect = {"video_id", "frame_idx", "nss",
                                           "auc_judd", "sauc",      "cc",
                                           "sim"};
  if (header != expect) throw Error(Errc::bad_format, "bad score CSV header in " + path.string());
  std::vector<ScoreRecord> records;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 7) throw Error(Errc::bad_format, "bad score CSV row: " + line);
    ScoreRecord r;
    r.video_id = f[0];
    r.frame_idx = std::stoi(f[1]);
    auto parse = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    r.nss = parse(f[2]);
    r.auc_judd = parse(f[3]);
    r.sauc = parse(f[4]);
    r.cc = parse(f[5]);
    r.sim = parse(f[6]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SourceRegion> read_source_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::truncated_file, "empty source CSV");
  auto header = split_csv_line(line);
  const std::vector<std::string> expect = {"video_id", "frame_idx", "x_min",
                                           "y_min",    "x_max",     "y_max"};
  if (header != expect) throw Error(Errc::bad_format, "bad source CSV header in " + path.string());
  std::vector<SourceRegion> regions;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 6) throw Error(Errc::bad_format, "bad source CSV row: " + line);
    SourceRegion r;
    r.video_id = f[0];
    try {
      r.frame_idx = std::stoi(f[1]);
      r.x_min = std::stoi(f[2]);
      r.y_min = std::stoi(f[3]);
      r.x_max = std::stoi(f[4]);
      r.y_max = std::stoi(f[5]);
    } catch (const std::exception&) {
      throw Error(Errc::bad_format, "non-numeric field in source CSV row: " + line);
    }
    regions.push_back(std::move(r));
  }
  return regions;
}

void write_source_csv(const std::vector<SourceRegion>& regions,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot open for writing: " + path.string());
  out << "video_id,frame_idx,x_min,y_min,x_max,y_max\n";
  for (const auto& r : regions) {
    out << r.video_id << ',' << r.frame_idx << ',' << r.x_min << ',' << r.y_min << ',' << r.x_max
        << ',' << r.y_max << '\n';
  }
}

}  // namespace avsal
