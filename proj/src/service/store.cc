#include "fpkit/service/store.h"

#include <sqlite3.h>

#include "fpkit/error.h"

namespace fpkit {
namespace {

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
      throw Error("store_error", sqlite3_errmsg(db));
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  void Bind(int index, const std::string& text) {
    sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()),
                      SQLITE_TRANSIENT);
  }
  void Bind(int index, std::uint64_t value) {
    sqlite3_bind_int64(stmt_, index, static_cast<sqlite3_int64>(value));
  }
  // SQLITE_ROW or SQLITE_DONE; anything else throws.
  int Step() {
    const int rc = sqlite3_step(stmt_);
    if (rc != SQLITE_ROW && rc != SQLITE_DONE && rc != SQLITE_CONSTRAINT)
      throw Error("store_error", sqlite3_errmsg(db_));
    return rc;
  }
  sqlite3_stmt* get() { return stmt_; }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace

std::optional<StoredAccount> MemoryAccountStore::Load(
    const std::string& account_id) {
  std::lock_guard lock(mu_);
  auto it = rows_.find(account_id);
  if (it == rows_.end()) return std::nullopt;
  return it->second;
}

bool MemoryAccountStore::Insert(const std::string& account_id,
                                const std::string& body) {
  std::lock_guard lock(mu_);
  return rows_.emplace(account_id, StoredAccount{1, body}).second;
}

bool MemoryAccountStore::Update(const std::string& account_id,
                                std::uint64_t expected_version,
                                const std::string& body) {
  std::lock_guard lock(mu_);
  auto it = rows_.find(account_id);
  if (it == rows_.end() || it->second.version != expected_version) return false;
  it->second = {expected_version + 1, body};
  return true;
}

size_t MemoryAccountStore::Count() {
  std::lock_guard lock(mu_);
  return rows_.size();
}

SqliteAccountStore::SqliteAccountStore(const std::string& path) {
  if (sqlite3_open_v2(path.c_str(), &db_,
                      SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE |
                          SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    std::string message = db_ ? sqlite3_errmsg(db_) : "cannot open " + path;
    sqlite3_close(db_);
    throw Error("store_error", message);
  }
  sqlite3_busy_timeout(db_, 5000);
  Exec("PRAGMA journal_mode=WAL");
  Exec("PRAGMA synchronous=FULL");
  Exec(
      "CREATE TABLE IF NOT EXISTS accounts ("
      " account_id TEXT PRIMARY KEY,"
      " version INTEGER NOT NULL,"
      " body TEXT NOT NULL)");
}

SqliteAccountStore::~SqliteAccountStore() { sqlite3_close(db_); }

void SqliteAccountStore::Exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string message = err ? err : "sqlite error";
    sqlite3_free(err);
    throw Error("store_error", message);
  }
}

std::optional<StoredAccount> SqliteAccountStore::Load(
    const std::string& account_id) {
  std::lock_guard lock(mu_);
  Statement stmt(db_, "SELECT version, body FROM accounts WHERE account_id = ?");
  stmt.Bind(1, account_id);
  if (stmt.Step() != SQLITE_ROW) return std::nullopt;
  StoredAccount out;
  out.version = static_cast<std::uint64_t>(sqlite3_column_int64(stmt.get(), 0));
  const auto* text = sqlite3_column_text(stmt.get(), 1);
  out.body.assign(reinterpret_cast<const char*>(text),
                  static_cast<size_t>(sqlite3_column_bytes(stmt.get(), 1)));
  return out;
}

bool SqliteAccountStore::Insert(const std::string& account_id,
                                const std::string& body) {
  std::lock_guard lock(mu_);
  Statement stmt(db_,
                 "INSERT OR IGNORE INTO accounts (account_id, version, body) "
                 "VALUES (?, 1, ?)");
  stmt.Bind(1, account_id);
  stmt.Bind(2, body);
  stmt.Step();
  return sqlite3_changes(db_) == 1;
}

bool SqliteAccountStore::Update(const std::string& account_id,
                                std::uint64_t expected_version,
                                const std::string& body) {
  std::lock_guard lock(mu_);
  Statement stmt(db_,
                 "UPDATE accounts SET version = version + 1, body = ? "
                 "WHERE account_id = ? AND version = ?");
  stmt.Bind(1, body);
  stmt.Bind(2, account_id);
  stmt.Bind(3, expected_version);
  stmt.Step();
  return sqlite3_changes(db_) == 1;
}

size_t SqliteAccountStore::Count() {
  std::lock_guard lock(mu_);
  Statement stmt(db_, "SELECT COUNT(*) FROM accounts");
  stmt.Step();
  return static_cast<size_t>(sqlite3_column_int64(stmt.get(), 0));
}

std::unique_ptr<AccountStore> OpenAccountStore(const std::string& path) {
  if (path == ":memory:") return std::make_unique<MemoryAccountStore>();
  return std::make_unique<SqliteAccountStore>(path);
}

}  // namespace fpkit
