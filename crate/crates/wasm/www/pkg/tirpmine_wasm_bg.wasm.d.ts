/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_explorer_free: (a: number, b: number) => void;
export const discretize: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const explorer_csv: (a: number) => [number, number];
export const explorer_generate: (a: number, b: number) => [number, number, number];
export const explorer_intervals: (a: number, b: number, c: number) => [number, number, number, number];
export const explorer_mine: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const explorer_new: (a: number, b: number) => [number, number, number];
export const explorer_pair: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const explorer_summary: (a: number) => [number, number];
export const explorer_timeline: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
