#include "calgap/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace calgap {
namespace {

using nlohmann::json;

std::ifstream open_input(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  return out;
}

double parse_double(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto *end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'", line);
  return value;
}

std::uint64_t parse_u64(std::string_view text, std::size_t line) {
  std::uint64_t value = 0;
  const auto *end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(ErrorKind::ParseError, "not an unsigned integer: '" + std::string(text) + "'",
                line);
  return value;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view chomp(const std::string &line) {
  std::string_view view(line);
  if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
  return view;
}

struct PendingGroup {
  std::size_t num_classes = 0;
  std::vector<PredictionRecord> records;
};

PredictionRecord record_from_json(const json &obj, std::size_t line) {
  if (!obj.is_object()) throw Error(ErrorKind::ParseError, "expected a JSON object", line);
  PredictionRecord r;
  const auto label = obj.find("label");
  if (label == obj.end() || !label->is_number_integer())
    throw Error(ErrorKind::ParseError, "missing integer \"label\"", line);
  r.label = label->get<int>();

  const auto probs = obj.find("probs");
  const auto conf = obj.find("conf");
  if (probs != obj.end()) {
    if (!probs->is_array() || probs->empty())
      throw Error(ErrorKind::ParseError, "\"probs\" must be a non-empty array", line);
    for (const auto &p : *probs) {
      if (!p.is_number()) throw Error(ErrorKind::ParseError, "\"probs\" must hold numbers", line);
      r.probs.push_back(p.get<double>());
    }
  } else if (conf != obj.end()) {
    if (!conf->is_number()) throw Error(ErrorKind::ParseError, "\"conf\" must be a number", line);
    r.probs = {conf->get<double>()};
  } else {
    throw Error(ErrorKind::ParseError, "record needs \"probs\" or \"conf\"", line);
  }

  r.split = Split::Test;
  if (const auto split = obj.find("split"); split != obj.end()) {
    const auto parsed = split->is_string() ? parse_split(split->get<std::string>()) : std::nullopt;
    if (!parsed) throw Error(ErrorKind::ParseError, "\"split\" must be \"train\" or \"test\"", line);
    r.split = *parsed;
  }
  r.step = 0;
  if (const auto step = obj.find("step"); step != obj.end()) {
    if (!step->is_number_unsigned())
      throw Error(ErrorKind::ParseError, "\"step\" must be a non-negative integer", line);
    r.step = step->get<std::uint64_t>();
  }
  return r;
}

} // namespace

std::vector<LogGroup> parse_log(std::istream &in) {
  // Key: (step, split) with train (0) ordered before test (1).
  std::map<std::pair<std::uint64_t, int>, PendingGroup> groups;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto view = chomp(text);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    json obj;
    try {
      obj = json::parse(view);
    } catch (const json::exception &e) {
      throw Error(ErrorKind::ParseError, e.what(), line);
    }
    auto record = record_from_json(obj, line);
    const std::size_t classes = record.probs.size() == 1 ? 2 : record.probs.size();
    auto &group = groups[{*record.step, *record.split == Split::Train ? 0 : 1}];
    if (group.num_classes == 0) group.num_classes = classes;
    try {
      if (classes != group.num_classes)
        fail(ErrorKind::ValidationError, "record has " + std::to_string(classes) +
                                             " classes, its group has " +
                                             std::to_string(group.num_classes));
      validate_record(record, group.num_classes);
    } catch (const Error &e) {
      throw Error(e.kind(), e.what(), line);
    }
    group.records.push_back(std::move(record));
  }
  std::vector<LogGroup> out;
  for (auto &[key, group] : groups)
    out.push_back({key.second == 0 ? Split::Train : Split::Test, key.first,
                   Dataset(std::move(group.records), group.num_classes)});
  return out;
}

std::vector<LogGroup> parse_log(const std::filesystem::path &path) {
  auto in = open_input(path);
  return parse_log(in);
}

std::string format_log_record(const PredictionRecord &record) {
  json obj = json::object();
  obj["split"] = std::string(to_string(record.split.value_or(Split::Test)));
  obj["step"] = record.step.value_or(0);
  obj["label"] = record.label;
  if (record.is_binary_form())
    obj["conf"] = record.probs[0];
  else
    obj["probs"] = record.probs;
  return obj.dump();
}

void write_log(std::ostream &out, const Dataset &data) {
  for (const auto &r : data.records()) out << format_log_record(r) << '\n';
}

std::string format_sig9(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void write_trajectory(std::ostream &out, std::span<const TrajectoryPoint> trajectory) {
  const auto round9 = [](double v) { return std::stod(format_sig9(v)); };
  out << kTrajectoryHeader << '\n';
  for (const auto &p : trajectory) {
    const auto rounded = make_trajectory_point(p.step, round9(p.train_error), round9(p.test_error),
                                               round9(p.train_ece), round9(p.test_ece));
    out << rounded.step << ',' << format_sig9(rounded.train_error) << ','
        << format_sig9(rounded.test_error) << ',' << format_sig9(rounded.train_ece) << ','
        << format_sig9(rounded.test_ece) << ',' << format_sig9(rounded.error_gap) << ','
        << format_sig9(rounded.calib_gap) << '\n';
  }
}

void write_trajectory(const std::filesystem::path &path,
                      std::span<const TrajectoryPoint> trajectory) {
  auto out = open_output(path);
  write_trajectory(out, trajectory);
  if (!out) fail(ErrorKind::IoError, "failed writing " + path.string());
}

std::vector<TrajectoryPoint> parse_trajectory(std::istream &in) {
  std::string text;
  std::size_t line = 0;
  if (!std::getline(in, text)) throw Error(ErrorKind::ParseError, "empty trajectory file", 1);
  ++line;
  if (chomp(text) != kTrajectoryHeader)
    throw Error(ErrorKind::ParseError, "unexpected trajectory header", line);
  std::vector<TrajectoryPoint> points;
  while (std::getline(in, text)) {
    ++line;
    const auto view = chomp(text);
    if (view.empty()) continue;
    const auto fields = split_csv(view);
    if (fields.size() != 7)
      throw Error(ErrorKind::ParseError, "expected 7 columns, got " + std::to_string(fields.size()),
                  line);
    TrajectoryPoint p;
    p.step = parse_u64(fields[0], line);
    p.train_error = parse_double(fields[1], line);
    p.test_error = parse_double(fields[2], line);
    p.train_ece = parse_double(fields[3], line);
    p.test_ece = parse_double(fields[4], line);
    p.error_gap = parse_double(fields[5], line);
    p.calib_gap = parse_double(fields[6], line);
    for (double v : {p.train_error, p.test_error, p.train_ece, p.test_ece, p.error_gap, p.calib_gap})
      if (!(v >= 0.0 && v <= 1.0))
        throw Error(ErrorKind::ValidationError, "trajectory value outside [0, 1]", line);
    points.push_back(p);
  }
  return points;
}

std::vector<TrajectoryPoint> parse_trajectory(const std::filesystem::path &path) {
  auto in = open_input(path);
  return parse_trajectory(in);
}

void write_samples(std::ostream &out, const Samples &samples) {
  for (std::size_t j = 0; j < samples.dim; ++j) out << 'x' << j << ',';
  out << "y\n";
  char buf[32];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (double v : samples.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << samples.labels[i] << '\n';
  }
}

Samples parse_samples(std::istream &in) {
  std::string text;
  std::size_t line = 1;
  if (!std::getline(in, text)) throw Error(ErrorKind::ParseError, "empty dataset file", line);
  const auto header = split_csv(chomp(text));
  if (header.size() < 2 || header.back() != "y")
    throw Error(ErrorKind::ParseError, "dataset header must be x0,...,y", line);
  Samples s;
  s.dim = header.size() - 1;
  while (std::getline(in, text)) {
    ++line;
    const auto view = chomp(text);
    if (view.empty()) continue;
    const auto fields = split_csv(view);
    if (fields.size() != s.dim + 1)
      throw Error(ErrorKind::ParseError, "wrong number of columns", line);
    for (std::size_t j = 0; j < s.dim; ++j) s.features.push_back(parse_double(fields[j], line));
    s.labels.push_back(static_cast<int>(parse_u64(fields[s.dim], line)));
  }
  return s;
}

} // namespace calgap
