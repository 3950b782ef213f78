#ifndef FPKIT_PREPROCESS_ENVIRONMENT_H_
#define FPKIT_PREPROCESS_ENVIRONMENT_H_

#include <string>
#include <string_view>

namespace fpkit {

enum class DeviceType { kMobile, kTablet, kMisc, kDesktop };

std::string_view DeviceTypeName(DeviceType type);

struct EnvironmentClass {
  DeviceType device_type = DeviceType::kDesktop;
  std::string browser_family;
  std::string os_family;
};

// Keyword classification of a user agent (matched in lowercase).
//
// Device type: mobile needs a mobile keyword and no tablet or misc keyword;
// tablet needs a tablet keyword and no misc keyword; any misc keyword gives
// misc; everything else is a desktop.
//
// Browser family: first family, in the order Firefox, Edge, Internet
// Explorer, Samsung Internet, Chrome, Safari, with a matching keyword.
//
// OS family: mobile systems are tested first (Windows Phone, Android, iOS)
// because their user agents also carry desktop keywords such as "linux";
// then Windows 10, Windows 7, Other Windows, Mac OS (without ipad/iphone),
// Linux-based. No match gives "Other".
EnvironmentClass ClassifyEnvironment(std::string_view user_agent);

}  // namespace fpkit

#endif  // FPKIT_PREPROCESS_ENVIRONMENT_H_
