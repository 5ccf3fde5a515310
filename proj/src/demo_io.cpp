#include "cua/demo_io.hpp"

#include <algorithm>
#include <sstream>

#include <json.hpp>

#include "cua/action.hpp"
#include "cua/util.hpp"

namespace cua::core {

using nlohmann::json;
using nlohmann::ordered_json;

namespace fs = std::filesystem;

RawDemonstration load_demonstration(const fs::path& dir) {
  RawDemonstration demo;

  json manifest = json::parse(read_file(dir / "manifest.json"), nullptr, false);
  if (manifest.is_discarded())
    throw CuaError(Err::format_error, "manifest.json is not valid JSON");
  demo.instruction = manifest.at("instruction").get<std::string>();
  demo.os = os_from_name(manifest.at("os").get<std::string>());
  demo.resolution.width = manifest.at("resolution").at("width").get<int>();
  demo.resolution.height = manifest.at("resolution").at("height").get<int>();
  demo.epoch = manifest.value("epoch", std::int64_t{0});
  demo.status = status_from_name(manifest.value("status", "success"));

  for (const std::string& line : split_lines(read_file(dir / "events.jsonl"))) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw CuaError(Err::format_error, "bad event line: " + line);
    RawEvent e;
    e.t = j.at("t").get<std::int64_t>();
    e.device = j.at("device").get<std::string>() == "mouse" ? Device::mouse
                                                            : Device::keyboard;
    e.kind = event_kind_from_name(j.at("kind").get<std::string>());
    if (j.contains("x")) e.pos = Point{j.at("x").get<double>(), j.at("y").get<double>()};
    if (j.contains("button")) e.button = button_from_name(j.at("button").get<std::string>());
    if (j.contains("dx") || j.contains("dy"))
      e.wheel = WheelDelta{j.value("dx", 0), j.value("dy", 0)};
    if (j.contains("key")) e.key = j.at("key").get<std::string>();
    demo.events.push_back(std::move(e));
  }

  for (const std::string& line : split_lines(read_file(dir / "frames.jsonl"))) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw CuaError(Err::format_error, "bad frame line: " + line);
    Frame f;
    f.index = j.at("index").get<int>();
    f.t = j.at("t").get<std::int64_t>();
    f.file = j.at("file").get<std::string>();
    f.width = j.at("w").get<int>();
    f.height = j.at("h").get<int>();
    demo.frames.push_back(std::move(f));
  }

  if (fs::exists(dir / "axtree.jsonl")) {
    for (const std::string& line : split_lines(read_file(dir / "axtree.jsonl"))) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded()) continue;
      demo.axtree_snapshots[j.at("t").get<std::int64_t>()] =
          j.at("tree").get<std::string>();
    }
  }

  return demo;
}

void save_demonstration(const RawDemonstration& demo, const fs::path& dir) {
  fs::create_directories(dir / "frames");

  ordered_json manifest;
  manifest["instruction"] = demo.instruction;
  manifest["os"] = os_name(demo.os);
  manifest["resolution"] = {{"width", demo.resolution.width},
                            {"height", demo.resolution.height}};
  manifest["epoch"] = demo.epoch;
  manifest["status"] = status_name(demo.status);
  atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");

  std::ostringstream events;
  for (const RawEvent& e : demo.events) {
    ordered_json j;
    j["t"] = e.t;
    j["device"] = e.device == Device::mouse ? "mouse" : "keyboard";
    j["kind"] = event_kind_name(e.kind);
    if (e.pos) {
      j["x"] = quantize_coord(e.pos->x);
      j["y"] = quantize_coord(e.pos->y);
    }
    if (e.button) j["button"] = button_name(*e.button);
    if (e.wheel) {
      j["dx"] = e.wheel->dx;
      j["dy"] = e.wheel->dy;
    }
    if (e.key) j["key"] = *e.key;
    events << j.dump() << "\n";
  }
  atomic_write(dir / "events.jsonl", events.str());

  std::ostringstream frames;
  for (const Frame& f : demo.frames) {
    ordered_json j;
    j["index"] = f.index;
    j["t"] = f.t;
    j["file"] = f.file;
    j["w"] = f.width;
    j["h"] = f.height;
    frames << j.dump() << "\n";
  }
  atomic_write(dir / "frames.jsonl", frames.str());

  if (!demo.axtree_snapshots.empty()) {
    std::ostringstream ax;
    for (const auto& [t, tree] : demo.axtree_snapshots) {
      ordered_json j;
      j["t"] = t;
      j["tree"] = tree;
      ax << j.dump() << "\n";
    }
    atomic_write(dir / "axtree.jsonl", ax.str());
  }
}

bool is_demonstration_dir(const fs::path& dir) {
  return fs::exists(dir / "manifest.json");
}

std::vector<fs::path> list_corpus(const fs::path& root) {
  std::vector<fs::path> out;
  if (!fs::is_directory(root))
    throw CuaError(Err::input_error, "not a directory: " + root.string());
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && is_demonstration_dir(entry.path()))
      out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cua::core
