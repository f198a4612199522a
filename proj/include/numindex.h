/* C interface to the numindex library.
 *
 * A workspace is created from a JSON config (file or string) describing the
 * field, named spaces, named operators, budgets, and seed. Commands mirror
 * the CLI subcommands: norm, opnorm, vradius, nindex, range, scan, lip,
 * bench. Arguments are passed as parallel key/value string arrays.
 *
 * Return codes: 0 = success, 1 = computation diagnostic, 2 = usage or
 * config error. On nonzero return, numindex_last_error() describes the
 * failure. Strings returned through out-parameters must be released with
 * numindex_string_free().
 */
#ifndef NUMINDEX_H
#define NUMINDEX_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct numindex_workspace numindex_workspace;

#define NUMINDEX_OK 0
#define NUMINDEX_ERR_COMPUTE 1
#define NUMINDEX_ERR_INPUT 2

int numindex_workspace_from_file(const char* path, numindex_workspace** out);
int numindex_workspace_from_json(const char* json_text, numindex_workspace** out);
void numindex_workspace_free(numindex_workspace* ws);

/* Runs one command. keys/values are nargs parallel arrays of argument names
 * (without leading dashes) and values. text_out receives the human-readable
 * report; csv_out (may be NULL on return) receives CSV payload for commands
 * that produce one. Either out-pointer may be NULL if not wanted. */
int numindex_run(numindex_workspace* ws, const char* command, const char* const* keys,
                 const char* const* values, int nargs, char** text_out, char** csv_out);

/* Message for the most recent failure on this thread. */
const char* numindex_last_error(void);

void numindex_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* NUMINDEX_H */
