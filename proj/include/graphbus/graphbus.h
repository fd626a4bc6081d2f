/*
 * graphbus C API — brokerless publish/subscribe middleware.
 *
 * One API covers three transports: messages stay in-process (shared by
 * reference, zero copy) unless the runtime's network config exports their
 * channel, in which case they are additionally serialized, framed and
 * shipped to the configured peers. Everything is driven by two files in a
 * config directory:
 *
 *   network_setting.yaml   publisher/subscriber endpoints + channel routing
 *   params.yaml            parameter server content
 *
 * All handles are opaque. Functions return GB_OK or an error code;
 * gb_last_error() describes the most recent failure on the calling thread.
 * Unless noted otherwise, functions are thread-safe.
 */

#ifndef GRAPHBUS_H
#define GRAPHBUS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct gb_runtime gb_runtime;
typedef struct gb_options gb_options;
typedef struct gb_buffer gb_buffer;
typedef uint64_t gb_node;

typedef enum gb_status {
  GB_OK = 0,
  GB_ERR_INVALID_ARGUMENT = 1,
  GB_ERR_INVALID_CHANNEL = 2,
  GB_ERR_CHANNEL_TOO_LONG = 3,
  GB_ERR_PAYLOAD_TOO_LARGE = 4,
  GB_ERR_DUPLICATE_CODEC = 5,
  GB_ERR_MISSING_CODEC = 6,
  GB_ERR_CHANNEL_CODEC_CONFLICT = 7,
  GB_ERR_GRAPH_SHUT_DOWN = 8,
  GB_ERR_UNKNOWN_NODE = 9,
  GB_ERR_CONFIG_PARSE = 10,
  GB_ERR_INVALID_URI = 11,
  GB_ERR_BIND_FAILURE = 12,
  GB_ERR_CYCLE = 13,
  GB_ERR_REPARENT = 14,
  GB_ERR_UNKNOWN_FRAME = 15,
  GB_ERR_DISCONNECTED_FRAMES = 16,
  GB_ERR_INVALID_TRANSFORM = 17,
  GB_ERR_NOT_FOUND = 18,
  GB_ERR_TYPE_MISMATCH = 19,
  GB_ERR_PEER_UNREACHABLE = 20,
  GB_ERR_TIMEOUT = 21,
  GB_ERR_IO = 22,
  GB_ERR_INTERNAL = 23
} gb_status;

/* Subscriber execution contract. Serial nodes never overlap themselves and
 * see messages in arrival order; concurrent nodes may run on many workers
 * at once. */
typedef enum gb_invoke { GB_INVOKE_SERIAL = 0, GB_INVOKE_CONCURRENT = 1 } gb_invoke;

typedef enum gb_frame_result {
  GB_FRAME_OK = 0,
  GB_FRAME_TRUNCATED_HEADER = 1,
  GB_FRAME_BAD_SEPARATOR = 2,
  GB_FRAME_BAD_UTF8 = 3,
  GB_FRAME_BAD_CHANNEL = 4
} gb_frame_result;

const char* gb_status_name(gb_status status);

/* Message for the most recent failing call on this thread; never NULL. */
const char* gb_last_error(void);

/* ---- options -------------------------------------------------------- */

gb_options* gb_options_new(void);
void gb_options_free(gb_options* options);
gb_status gb_options_set_config_dir(gb_options* options, const char* path);
/* value uses config syntax: "4" is an integer, "0.5" a real, "on" a string */
gb_status gb_options_set_param(gb_options* options, const char* key,
                               const char* value);
gb_status gb_options_set_workers(gb_options* options, unsigned workers);

/* ---- runtime --------------------------------------------------------- */

/* options may be NULL for an all-defaults in-process runtime. */
gb_status gb_runtime_new(const gb_options* options, gb_runtime** out);

/* Stops the bridge, drains the graph, releases the runtime. */
void gb_runtime_free(gb_runtime* rt);

gb_status gb_runtime_shutdown(gb_runtime* rt);

/* 1 when all queued deliveries completed within timeout_ms, else 0. */
int gb_wait_idle(gb_runtime* rt, uint64_t timeout_ms);

uint64_t gb_instance_id(gb_runtime* rt);

/* ---- payload buffers -------------------------------------------------- */

/* Immutable refcounted byte buffer; created with one reference.
 * data may be NULL when size is 0. The reference count is metadata: taking
 * a reference on a const buffer (e.g. inside a subscriber callback) is
 * legal and returns a handle usable wherever a gb_buffer* is expected. */
gb_buffer* gb_buffer_new(const void* data, size_t size);
gb_buffer* gb_buffer_ref(const gb_buffer* buffer);
void gb_buffer_unref(const gb_buffer* buffer);
const void* gb_buffer_data(const gb_buffer* buffer);
size_t gb_buffer_size(const gb_buffer* buffer);

/* ---- publish / subscribe ---------------------------------------------- */

/* Delivered to the subscriber: `payload` is borrowed for the duration of the
 * call (gb_buffer_ref to keep it). Every subscriber on the channel receives
 * the identical buffer — payload bytes are never copied in-process. */
typedef void (*gb_message_fn)(void* user, const char* channel,
                              uint64_t sequence, const gb_buffer* payload);

/* Local delivery always; when the channel is exported by the network config
 * the payload is also serialized through the codec named by type_tag
 * (NULL = "bytes") and sent to the connected peers. Non-blocking.
 * GB_ERR_MISSING_CODEC reports an exported channel without a codec — local
 * delivery has still happened in that case. */
gb_status gb_to_any(gb_runtime* rt, const char* channel, gb_buffer* payload,
                    const char* type_tag);

/* Subscribes `fn`. type_tag (NULL = "bytes") binds the channel's inbound
 * decoder; one payload type per channel. */
gb_status gb_from_any(gb_runtime* rt, const char* channel, gb_invoke invoke,
                      const char* type_tag, gb_message_fn fn, void* user,
                      gb_node* out_node);

/* Intra-process only: no codec involved, never touches the network. */
gb_status gb_to_graph(gb_runtime* rt, const char* channel, gb_buffer* payload);
gb_status gb_from_graph(gb_runtime* rt, const char* channel, gb_invoke invoke,
                        gb_message_fn fn, void* user, gb_node* out_node);

/* Blocks until the node's in-flight callback (if any) returns; afterwards no
 * further deliveries happen. */
gb_status gb_deregister(gb_runtime* rt, gb_node node);

/* ---- codecs ------------------------------------------------------------ */

/* Encode returns a new buffer holding the wire bytes (the library takes
 * ownership of one reference); decode turns wire bytes back into a payload
 * buffer. Return NULL to signal failure. */
typedef gb_buffer* (*gb_encode_fn)(void* user, const gb_buffer* payload);
typedef gb_buffer* (*gb_decode_fn)(void* user, const void* data, size_t size);

/* Registering the same functions under the same tag twice is a no-op;
 * a different codec under an existing tag fails with
 * GB_ERR_DUPLICATE_CODEC. */
gb_status gb_register_codec(gb_runtime* rt, const char* type_tag,
                            gb_encode_fn encode, gb_decode_fn decode,
                            void* user);

/* ---- wire framing ------------------------------------------------------ */

/* Frame layout, little-endian integers:
 *   [header_length: u32] [header_separator: u16 = 0x4852]
 *   [head_str: UTF-8 channel name] [data_string]
 * On byte streams every frame additionally carries an outer u32 LE length
 * prefix covering the whole frame. */

/* *out receives a malloc'd frame (free with gb_free), *out_size its size. */
gb_status gb_wire_pack(const char* channel, const void* data, size_t size,
                       uint8_t** out, size_t* out_size);

/* Parses frame[0..size). On GB_FRAME_OK, channel_out (>= 256 bytes) gets the
 * NUL-terminated channel name; *data_out and *data_size point into `frame`.
 * Any other result means the frame must be discarded. Never crashes on
 * arbitrary input. */
gb_frame_result gb_wire_unpack(const uint8_t* frame, size_t size,
                               char channel_out[256],
                               const uint8_t** data_out, size_t* data_size);

void gb_free(void* p);

/* ---- bridge statistics ------------------------------------------------- */

typedef struct gb_bridge_stats {
  uint64_t frames_sent;
  uint64_t frames_received;
  uint64_t frames_discarded;
  uint64_t frames_unrouted;
  uint64_t bytes_sent;
  uint64_t bytes_received;
  uint64_t frames_dropped_backpressure;
  uint64_t publisher_peers;   /* connected inbound peers (gauge) */
  uint64_t subscriber_links;  /* connected outbound links (gauge) */
} gb_bridge_stats;

int gb_bridge_enabled(gb_runtime* rt);
gb_status gb_get_bridge_stats(gb_runtime* rt, gb_bridge_stats* out);

/* Publisher endpoint with the real bound port (config may say port 0). */
gb_status gb_bound_endpoint(gb_runtime* rt, char* out, size_t out_size);

/* ---- time system ------------------------------------------------------- */

/* Nanoseconds since the runtime's reference epoch. */
int64_t gb_now_ns(gb_runtime* rt);
gb_status gb_set_epoch_now(gb_runtime* rt);

/* ---- parameter server -------------------------------------------------- */

/* Dotted-path keys ("data_graph.workers"). Typed getters fail with
 * GB_ERR_NOT_FOUND / GB_ERR_TYPE_MISMATCH; no coercion between kinds.
 * gb_param_get_string copies at most out_size-1 bytes, NUL-terminated. */
gb_status gb_param_get_int(gb_runtime* rt, const char* key, int64_t* out);
gb_status gb_param_get_double(gb_runtime* rt, const char* key, double* out);
gb_status gb_param_get_bool(gb_runtime* rt, const char* key, int* out);
gb_status gb_param_get_string(gb_runtime* rt, const char* key, char* out,
                              size_t out_size);

gb_status gb_param_set_int(gb_runtime* rt, const char* key, int64_t value);
gb_status gb_param_set_double(gb_runtime* rt, const char* key, double value);
gb_status gb_param_set_bool(gb_runtime* rt, const char* key, int value);
gb_status gb_param_set_string(gb_runtime* rt, const char* key,
                              const char* value);
/* value in config syntax, like gb_options_set_param. */
gb_status gb_param_set_yaml(gb_runtime* rt, const char* key,
                            const char* value);

uint64_t gb_param_generation(gb_runtime* rt);

/* ---- transform tree ----------------------------------------------------- */

/* matrix arguments are 16 doubles, row-major 4x4 homogeneous transforms
 * mapping child coordinates into the parent frame. */
gb_status gb_tf_set(gb_runtime* rt, const char* parent, const char* child,
                    const double matrix[16]);
gb_status gb_tf_lookup(gb_runtime* rt, const char* src, const char* dst,
                       double out_matrix[16]);
gb_status gb_tf_lca(gb_runtime* rt, const char* a, const char* b,
                    char out_frame[256]);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* GRAPHBUS_H */
