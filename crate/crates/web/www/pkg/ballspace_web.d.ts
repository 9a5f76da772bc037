/* tslint:disable */
/* eslint-disable */

/**
 * Centered maximal function of `expr`; JSON `{x, f, mf, sup_ratio}`.
 */
export function maximal_profile(expr: string, level: number, paper_normalization: boolean): string;

/**
 * Rubio majorant of `|expr|` in `L^p`; JSON `{x, k, r, mr, alpha, norm_m, terms, norm_k, norm_r}`.
 */
export function rubio(expr: string, level: number, p: number, alpha: number): string;

/**
 * Wavelet square functions `V f` and `W_0 f`; JSON `{x, f, v, w, norm_f, norm_quadratic}`.
 */
export function square_functions(expr: string, level: number, family: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly maximal_profile: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly rubio: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly square_functions: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
