#ifndef FPKIT_SERVICE_STORE_H_
#define FPKIT_SERVICE_STORE_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

struct sqlite3;

namespace fpkit {

struct StoredAccount {
  std::uint64_t version = 0;
  std::string body;
};

// Versioned key-value storage of serialized account records.
class AccountStore {
 public:
  virtual ~AccountStore() = default;

  virtual std::optional<StoredAccount> Load(const std::string& account_id) = 0;
  // Stores at version 1. False when the id is taken.
  virtual bool Insert(const std::string& account_id, const std::string& body) = 0;
  // Compare-and-set: writes only when the stored version equals
  // |expected_version|, then bumps it. False on a version mismatch.
  virtual bool Update(const std::string& account_id, std::uint64_t expected_version,
                      const std::string& body) = 0;
  virtual size_t Count() = 0;
};

class MemoryAccountStore : public AccountStore {
 public:
  std::optional<StoredAccount> Load(const std::string& account_id) override;
  bool Insert(const std::string& account_id, const std::string& body) override;
  bool Update(const std::string& account_id, std::uint64_t expected_version,
              const std::string& body) override;
  size_t Count() override;

 private:
  std::mutex mu_;
  std::map<std::string, StoredAccount> rows_;
};

// One SQLite connection in WAL mode with synchronous=FULL. Calls are
// serialized on an internal mutex.
class SqliteAccountStore : public AccountStore {
 public:
  // Throws Error("store_error") when the database cannot be opened.
  explicit SqliteAccountStore(const std::string& path);
  ~SqliteAccountStore() override;
  SqliteAccountStore(const SqliteAccountStore&) = delete;
  SqliteAccountStore& operator=(const SqliteAccountStore&) = delete;

  std::optional<StoredAccount> Load(const std::string& account_id) override;
  bool Insert(const std::string& account_id, const std::string& body) override;
  bool Update(const std::string& account_id, std::uint64_t expected_version,
              const std::string& body) override;
  size_t Count() override;

 private:
  void Exec(const char* sql);

  std::mutex mu_;
  sqlite3* db_ = nullptr;
};

// ":memory:" gives a MemoryAccountStore, anything else a SQLite file.
std::unique_ptr<AccountStore> OpenAccountStore(const std::string& path);

}  // namespace fpkit

#endif  // FPKIT_SERVICE_STORE_H_
