version = '0.3.1'

# 主版本号：求解器或报告格式不兼容的变化
# 次版本号：新的模型结构、噪声类型或子命令
# 修订版本号：bug 修复或非常小的变化
