/* tslint:disable */
/* eslint-disable */

export function cpiCurve(config_toml: string, start_ms: number, stop_ms: number, count: number): string;

/**
 * The built-in baseline scenario as TOML.
 */
export function defaultConfig(): string;

export function lfmWaveform(f_b_khz: number, t_r_us: number, t_0_us: number, pulses: number, antennas: number): string;

export function rateRegion(config_toml: string, axis: string, start_dbm: number, stop_dbm: number, count: number, schemes: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cpiCurve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly defaultConfig: () => [number, number];
    readonly lfmWaveform: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly rateRegion: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number, number];
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
