#include "fpkit/preprocess/environment.h"

#include <array>
#include <initializer_list>

#include "fpkit/util/strings.h"

namespace fpkit {

namespace {

constexpr std::array<std::string_view, 6> kMobileKeywords = {
    "phone", "mobile", "android", "iphone", "blackberry", "wpdesktop"};
constexpr std::array<std::string_view, 4> kTabletKeywords = {
    "ipad", "tablet", "terra pad", "tab"};
constexpr std::array<std::string_view, 10> kMiscKeywords = {
    "wii",      "playstation", "smart-tv", "smarttv", "googletv",
    "opera tv", "appletv",     "nintendo", "xbox",
    "opera/9.80 (linux i686; u; fr) presto/2.10.287 version/12.00 ; "
    "sc/ihd92 stb"};

struct Family {
  std::string_view name;
  std::initializer_list<std::string_view> keywords;
};

template <typename Keywords>
bool AnyOf(const std::string& ua, const Keywords& keywords) {
  for (std::string_view k : keywords)
    if (Contains(ua, k)) return true;
  return false;
}

}  // namespace

std::string_view DeviceTypeName(DeviceType type) {
  switch (type) {
    case DeviceType::kMobile:
      return "mobile";
    case DeviceType::kTablet:
      return "tablet";
    case DeviceType::kMisc:
      return "misc";
    case DeviceType::kDesktop:
      return "desktop";
  }
  return "desktop";
}

EnvironmentClass ClassifyEnvironment(std::string_view user_agent) {
  const std::string ua = ToLower(user_agent);
  EnvironmentClass out;

  bool mobile = AnyOf(ua, kMobileKeywords);
  bool tablet = AnyOf(ua, kTabletKeywords);
  bool misc = AnyOf(ua, kMiscKeywords);
  if (misc)
    out.device_type = DeviceType::kMisc;
  else if (tablet)
    out.device_type = DeviceType::kTablet;
  else if (mobile)
    out.device_type = DeviceType::kMobile;
  else
    out.device_type = DeviceType::kDesktop;

  static const Family kBrowsers[] = {
      {"Firefox", {"firefox"}},
      {"Edge", {"edge"}},
      {"Internet Explorer", {"msie", "trident/7.0"}},
      {"Samsung Internet", {"samsungbrowser"}},
      {"Chrome", {"chrome"}},
      {"Safari", {"safari"}},
  };
  out.browser_family = "Other";
  for (const auto& family : kBrowsers) {
    if (AnyOf(ua, family.keywords)) {
      out.browser_family = std::string(family.name);
      break;
    }
  }

  bool apple_mobile = Contains(ua, "ipad") || Contains(ua, "iphone");
  if (Contains(ua, "windows phone")) {
    out.os_family = "Windows Phone";
  } else if (Contains(ua, "android")) {
    out.os_family = "Android";
  } else if (apple_mobile) {
    out.os_family = "iOS";
  } else if (Contains(ua, "windows nt 10.0")) {
    out.os_family = "Windows 10";
  } else if (Contains(ua, "windows nt 6.1")) {
    out.os_family = "Windows 7";
  } else if (AnyOf(ua, std::initializer_list<std::string_view>{
                           "windows nt", "windows 7", "windows 98",
                           "windows 95", "windows ce"})) {
    out.os_family = "Other Windows";
  } else if (Contains(ua, "mac os x")) {
    out.os_family = "Mac OS";
  } else if (AnyOf(ua, std::initializer_list<std::string_view>{
                           "linux", "cros", "netbsd", "freebsd", "openbsd",
                           "fedora", "ubuntu", "mint"})) {
    out.os_family = "Linux-based";
  } else {
    out.os_family = "Other";
  }
  return out;
}

}  // namespace fpkit
