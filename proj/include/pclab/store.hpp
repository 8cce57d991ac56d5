// Persistent catalog store: an append-only directory of presentation files
// plus a JSON index keyed by address and fingerprint hash.
#pragma once

#include "pclab/export.hpp"

#include <filesystem>

namespace pclab {

class CatalogStore {
 public:
  explicit CatalogStore(std::string dir) : dir_(std::move(dir)) {
    namespace fs = std::filesystem;
    fs::create_directories(dir_ + "/presentations");
    load_index();
  }

  static std::string slug(const std::string& address) {
    std::string s;
    for (char c : address)
      s += (isalnum((unsigned char)c) ? c : '_');
    return s;
  }

  void put(Catalog& cat, TreeNode& n) {
    namespace fs = std::filesystem;
    std::string file = "presentations/" + slug(n.addr.str()) + ".pcp";
    std::string full = dir_ + "/" + file;
    if (!fs::exists(full)) {
      std::ofstream out(full);
      out << format_presentation(*n.pres);
    }
    nlohmann::json& e = index_["by_address"][n.addr.str()];
    e["file"] = file;
    e["fingerprint"] = fingerprint_json(cat, n, false);
    std::string key = n.fp.key();
    nlohmann::json& byfp = index_["by_fingerprint"][key];
    bool present = false;
    for (const auto& a : byfp)
      if (a.get<std::string>() == n.addr.str()) present = true;
    if (!present) byfp.push_back(n.addr.str());
    dirty_ = true;
  }

  std::optional<PcPresentation> get(const std::string& address) const {
    auto it = index_["by_address"].find(address);
    if (it == index_["by_address"].end()) return std::nullopt;
    std::ifstream in(dir_ + "/" + (*it)["file"].get<std::string>());
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_presentation(ss.str());
  }

  std::vector<std::string> list() const {
    std::vector<std::string> out;
    for (auto it = index_["by_address"].begin(); it != index_["by_address"].end(); ++it)
      out.push_back(it.key());
    return out;
  }

  std::vector<std::string> find_fingerprint(const std::string& key) const {
    std::vector<std::string> out;
    auto it = index_["by_fingerprint"].find(key);
    if (it == index_["by_fingerprint"].end()) return out;
    for (const auto& a : *it) out.push_back(a.get<std::string>());
    return out;
  }

  void flush() {
    if (!dirty_) return;
    std::string tmp = dir_ + "/index.json.tmp";
    {
      std::ofstream out(tmp);
      out << index_.dump(1);
    }
    std::filesystem::rename(tmp, dir_ + "/index.json");
    dirty_ = false;
  }

  ~CatalogStore() {
    try {
      flush();
    } catch (...) {
    }
  }

 private:
  std::string dir_;
  nlohmann::json index_ = {{"by_address", nlohmann::json::object()},
                           {"by_fingerprint", nlohmann::json::object()}};
  bool dirty_ = false;

  void load_index() {
    std::ifstream in(dir_ + "/index.json");
    if (!in) return;
    nlohmann::json j;
    in >> j;
    if (j.contains("by_address")) index_ = j;
  }
};

}  // namespace pclab
