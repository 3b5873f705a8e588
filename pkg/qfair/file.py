# -*- coding: utf-8 -*-
#
# ---------------------------------------
#   程序：file.py
#   版本：0.2
#   作者：lds
#   日期：2026-10-18
#   语言：Python 3.X
#   说明：文件编码判断和 json 读写
# ---------------------------------------
import os
import json


def get_encoding(fromfile):
    """
    文件编码判断
    :param fromfile:
    :return: 编码格式，gb2312 按 gbk 读取
    """
    from chardet.universaldetector import UniversalDetector
    with open(fromfile, 'rb') as f:
        detector = UniversalDetector()
        for line in f:
            detector.feed(line)
            if detector.done:
                break
        detector.close()
    encoding = detector.result['encoding']
    if encoding is None or encoding.lower() == 'ascii':
        return 'utf-8'
    if encoding.lower() == 'gb2312':
        return 'gbk'
    return encoding


def json_read(path):
    """
    读取 json 文件
    """
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def json_save(obj, path, indent=2):
    """
    保存 json 文件，目录不存在时自动创建
    """
    folder = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(folder):
        os.makedirs(folder)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, ensure_ascii=False, indent=indent)
    return True
