/* tslint:disable */
/* eslint-disable */

/**
 * An interval database held on the Rust side between calls.
 */
export class Explorer {
    free(): void;
    [Symbol.dispose](): void;
    csv(): string;
    static generate(seed: number, contradiction_rate: number): Explorer;
    intervals(entity: string): string;
    mine(min_vs: string, relations: string, sac: string, max_size: number): string;
    constructor(csv: string);
    pair(entity: string, i: number, j: number, epsilon: number): string;
    summary(): string;
    timeline(entity: string, symbols: string, relations: string): string;
}

/**
 * `values` and `labels` are comma- or whitespace-separated; labels may be
 * empty.
 */
export function discretize(values: string, labels: string, method: string, bins: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_explorer_free: (a: number, b: number) => void;
    readonly discretize: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly explorer_csv: (a: number) => [number, number];
    readonly explorer_generate: (a: number, b: number) => [number, number, number];
    readonly explorer_intervals: (a: number, b: number, c: number) => [number, number, number, number];
    readonly explorer_mine: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly explorer_new: (a: number, b: number) => [number, number, number];
    readonly explorer_pair: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly explorer_summary: (a: number) => [number, number];
    readonly explorer_timeline: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
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
