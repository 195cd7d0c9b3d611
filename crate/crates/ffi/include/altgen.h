#ifndef ALTGEN_H
#define ALTGEN_H

#include <stddef.h>
#include <stdint.h>

#define ALTGEN_MODE_TEXTT 0

#define ALTGEN_MODE_MMT_ICON 1

#define ALTGEN_MODE_MMT_CONTAINER 2

#define ALTGEN_OMIT_OCR_TEXT 1

#define ALTGEN_OMIT_RESOURCE_ID 2

#define ALTGEN_OMIT_PARENT_SIBLING 4

typedef enum AltgenStatus {
  ALTGEN_STATUS_OK = 0,
  ALTGEN_STATUS_NULL_ARGUMENT = 1,
  ALTGEN_STATUS_INVALID_UTF8 = 2,
  ALTGEN_STATUS_PARSE_ERROR = 3,
  ALTGEN_STATUS_NOT_FOUND = 4,
  ALTGEN_STATUS_ALREADY_ANNOTATED = 5,
  ALTGEN_STATUS_INVALID_INPUT = 6,
  ALTGEN_STATUS_IO_ERROR = 7,
  ALTGEN_STATUS_INTERNAL = 8,
} AltgenStatus;

/*
 A parsed layout and its detected icons.
 */
typedef struct AltgenLayout AltgenLayout;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer stays
 valid until the next altgen call on the same thread.
 */
const char *altgen_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *altgen_version(void);

/*
 Release a string returned by this library. NULL is ignored.

 # Safety
 `s` must come from this library and not have been freed already.
 */
void altgen_string_free(char *s);

/*
 Release a buffer returned by [`altgen_inject`]. NULL is ignored.

 # Safety
 `p` and `len` must be exactly what this library returned.
 */
void altgen_bytes_free(uint8_t *p, size_t len);

/*
 Parse layout XML and detect its icons. `activity_hint` may be NULL.

 # Safety
 `xml` must point to `len` readable bytes; string arguments must be
 NUL-terminated; `out` must be writable.
 */
enum AltgenStatus altgen_layout_parse(const uint8_t *xml,
                                      size_t len,
                                      const char *layout_name,
                                      const char *activity_hint,
                                      struct AltgenLayout **out);

/*
 Release a layout handle. NULL is ignored.

 # Safety
 `layout` must come from [`altgen_layout_parse`] and not be used afterwards.
 */
void altgen_layout_free(struct AltgenLayout *layout);

/*
 Number of detected icons.

 # Safety
 `layout` must be a live handle and `out` writable.
 */
enum AltgenStatus altgen_layout_icon_count(const struct AltgenLayout *layout, size_t *out);

/*
 JSON array describing the detected icons: path, class, resource id and
 whether a contentDescription is already present.

 # Safety
 `layout` must be a live handle and `out` writable.
 */
enum AltgenStatus altgen_layout_icons_json(const struct AltgenLayout *layout, char **out);

/*
 Canonical context JSON for the icon at `index`.

 # Safety
 `layout` must be a live handle and `out` writable.
 */
enum AltgenStatus altgen_layout_context_json(const struct AltgenLayout *layout,
                                             size_t index,
                                             char **out);

/*
 Prompt text for a context JSON under a mode (`ALTGEN_MODE_*`) and a set of
 `ALTGEN_OMIT_*` flags.

 # Safety
 `context_json` must be NUL-terminated and `out` writable.
 */
enum AltgenStatus altgen_build_prompt(const char *context_json,
                                      uint32_t mode,
                                      uint32_t ablation,
                                      char **out);

/*
 Insert `android:contentDescription` on the element at `path`. The new
 document is returned in `out`/`out_len`; free it with [`altgen_bytes_free`].

 # Safety
 `xml` must point to `len` bytes and `path` to `path_len` indices (may be
 NULL when `path_len` is 0); `alt_text` must be NUL-terminated.
 */
enum AltgenStatus altgen_inject(const uint8_t *xml,
                                size_t len,
                                const size_t *path,
                                size_t path_len,
                                const char *alt_text,
                                uint8_t **out,
                                size_t *out_len);

/*
 Score a JSON array of `{icon_ref, candidate, references}` records and
 return the metric report as JSON.

 # Safety
 `records_json` must be NUL-terminated and `out` writable.
 */
enum AltgenStatus altgen_evaluate(const char *records_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ALTGEN_H */
