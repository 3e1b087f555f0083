#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "xfer/transfer.hpp"

namespace xfer::transfer {

namespace {

constexpr char kMagic[8] = {'X', 'F', 'E', 'R', 'B', 'U', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void read_raw(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace

void save_buffer(const TransferBuffer& buffer, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_buffer: cannot open " + path);
  out.write(kMagic, sizeof kMagic);
  write_raw(out, kVersion);
  write_raw(out, static_cast<std::uint32_t>(buffer.state_dim()));
  write_raw(out, static_cast<std::uint32_t>(buffer.action_count()));
  write_raw(out, buffer.capture_window());
  write_raw(out, static_cast<std::uint64_t>(buffer.size()));
  for (const Transition& t : buffer.transitions()) {
    out.write(reinterpret_cast<const char*>(t.state.data()),
              static_cast<std::streamsize>(t.state.size() * sizeof(double)));
    write_raw(out, static_cast<std::int32_t>(t.action));
    write_raw(out, t.reward);
    out.write(reinterpret_cast<const char*>(t.next_state.data()),
              static_cast<std::streamsize>(t.next_state.size() * sizeof(double)));
    write_raw(out, static_cast<std::uint8_t>(t.done ? 1 : 0));
    write_raw(out, t.uncertainty);
  }
  if (!out) throw std::runtime_error("save_buffer: write failed for " + path);
}

TransferBuffer load_buffer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_buffer: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("load_buffer: bad magic in " + path);
  std::uint32_t version = 0, state_dim = 0, action_count = 0;
  double capture_window = 0.0;
  std::uint64_t count = 0;
  read_raw(in, version);
  if (version != kVersion)
    throw std::runtime_error("load_buffer: unsupported version in " + path);
  read_raw(in, state_dim);
  read_raw(in, action_count);
  read_raw(in, capture_window);
  read_raw(in, count);

  TransferBuffer buffer(static_cast<int>(state_dim), static_cast<int>(action_count),
                        capture_window);
  buffer.transitions().reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Transition t;
    t.state.resize(state_dim);
    in.read(reinterpret_cast<char*>(t.state.data()),
            static_cast<std::streamsize>(state_dim * sizeof(double)));
    std::int32_t action = 0;
    read_raw(in, action);
    t.action = action;
    read_raw(in, t.reward);
    t.next_state.resize(state_dim);
    in.read(reinterpret_cast<char*>(t.next_state.data()),
            static_cast<std::streamsize>(state_dim * sizeof(double)));
    std::uint8_t done = 0;
    read_raw(in, done);
    t.done = done != 0;
    read_raw(in, t.uncertainty);
    if (!in) throw std::runtime_error("load_buffer: truncated file " + path);
    buffer.transitions().push_back(std::move(t));
  }
  return buffer;
}

void save_buffer_jsonl(const TransferBuffer& buffer, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_buffer_jsonl: cannot open " + path);
  nlohmann::json header;
  header["state_dim"] = buffer.state_dim();
  header["action_count"] = buffer.action_count();
  header["capture_window"] = buffer.capture_window();
  header["count"] = buffer.size();
  out << header.dump() << '\n';
  for (const Transition& t : buffer.transitions()) {
    nlohmann::json j;
    j["s"] = t.state;
    j["a"] = t.action;
    j["r"] = t.reward;
    j["s_next"] = t.next_state;
    j["done"] = t.done;
    j["u"] = t.uncertainty;
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("save_buffer_jsonl: write failed for " + path);
}

TransferBuffer load_buffer_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_buffer_jsonl: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("load_buffer_jsonl: missing header in " + path);
  const auto header = nlohmann::json::parse(line);
  TransferBuffer buffer(header.at("state_dim").get<int>(),
                        header.at("action_count").get<int>(),
                        header.at("capture_window").get<double>());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Transition t;
    t.state = j.at("s").get<Vec>();
    t.action = j.at("a").get<int>();
    t.reward = j.at("r").get<double>();
    t.next_state = j.at("s_next").get<Vec>();
    t.done = j.at("done").get<bool>();
    t.uncertainty = j.at("u").get<double>();
    buffer.transitions().push_back(std::move(t));
  }
  return buffer;
}

}  // namespace xfer::transfer
